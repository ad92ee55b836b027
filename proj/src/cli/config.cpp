#include "maryland/cli/config.hpp"

#include <cmath>
#include <set>

namespace maryland::cli {

namespace {

// Typed access to one JSON object; remembers which keys were read so leftovers can be rejected.
class Section {
 public:
  Section(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError("E_TYPE", path_ + " must be an object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return obj_.contains(key);
  }

  const Json& raw(const std::string& key) {
    known_.insert(key);
    if (!obj_.contains(key)) throw ConfigError("E_MISSING_FIELD", "missing " + where(key));
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number()) throw ConfigError("E_TYPE", where(key) + " must be a number");
    return v.get<double>();
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  long long integer(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError("E_TYPE", where(key) + " must be an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const Json& v = obj_.at(key);
    if (!v.is_number_unsigned()) throw ConfigError("E_TYPE", where(key) + " must be a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = obj_.at(key);
    if (!v.is_boolean()) throw ConfigError("E_TYPE", where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const Json& v = obj_.at(key);
    if (!v.is_string()) throw ConfigError("E_TYPE", where(key) + " must be a string");
    return v.get<std::string>();
  }

  const Json& array(const std::string& key) {
    const Json& v = raw(key);
    if (!v.is_array()) throw ConfigError("E_TYPE", where(key) + " must be an array");
    return v;
  }

  Section child(const std::string& key) {
    known_.insert(key);
    static const Json empty = Json::object();
    return Section(obj_.contains(key) ? obj_.at(key) : empty, where(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : obj_.items())
      if (!known_.count(key)) throw ConfigError("E_UNKNOWN_KEY", "unknown key " + where(key));
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const Json& obj_;
  std::string path_;
  std::set<std::string> known_;
};

IntVec int_vector(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError("E_TYPE", where + " must be an integer array");
  IntVec out(static_cast<Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number_integer()) throw ConfigError("E_TYPE", where + " must be an integer array");
    out(static_cast<Index>(k)) = v[k].get<int>();
  }
  return out;
}

std::vector<double> number_list(const Json& v, const std::string& where) {
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError("E_TYPE", where + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("E_RANGE", what);
}

int as_int(long long v, const std::string& what) {
  require(v >= -1'000'000'000LL && v <= 1'000'000'000LL, what + " is out of range");
  return static_cast<int>(v);
}

long long box_volume(int dim, int radius) {
  long long v = 1;
  for (int k = 0; k < dim; ++k) v *= 2LL * radius + 1;
  return v;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("E_PARSE", std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Section top(root, "");

  Section model = top.child("model");
  c.model.d = as_int(model.integer("d"), "model.d");
  require(c.model.d >= 1 && c.model.d <= 3, "model.d must be 1, 2 or 3");
  c.model.eps = model.number("epsilon");
  c.model.theta = model.number("theta");
  if (model.has("alpha")) {
    const auto a = number_list(model.array("alpha"), "model.alpha");
    c.model.alpha = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Index>(a.size()));
  } else if (c.model.d == 1) {
    c.model.alpha = Eigen::VectorXd::Constant(1, golden_frequency());
  } else {
    throw ConfigError("E_MISSING_FIELD", "missing model.alpha (required when d > 1)");
  }
  if (c.model.alpha.size() != c.model.d) throw ConfigError("E_DIMENSION", "model.alpha must have d entries");
  c.model.gamma = model.number("gamma", c.model.gamma);
  c.model.tau = model.number("tau", c.model.tau);
  c.model.singularity_tol = model.number("singularity_tol", c.model.singularity_tol);
  c.box_radius = as_int(model.integer("box_radius", c.box_radius), "model.box_radius");
  model.reject_unknown();
  require(c.model.eps >= 0 && std::isfinite(c.model.eps), "model.epsilon must be finite and non-negative");
  require(std::isfinite(c.model.theta), "model.theta must be finite");
  require(c.model.alpha.allFinite(), "model.alpha must be finite");
  require(c.model.gamma > 0 && c.model.tau > 0, "model.gamma and model.tau must be positive");
  require(c.model.singularity_tol > 0 && c.model.singularity_tol < 0.5, "model.singularity_tol must lie in (0, 0.5)");
  require(c.box_radius >= 1, "model.box_radius must be at least 1");

  c.mode_cap = top.integer("mode_cap", c.mode_cap);
  require(c.mode_cap >= 1, "mode_cap must be positive");
  if (box_volume(c.model.d, c.box_radius) > c.mode_cap)
    throw ConfigError("E_CAP", "model box holds more sites than mode_cap");

  Section solver = top.child("solver");
  c.solver.p = as_int(solver.integer("p", c.solver.p), "solver.p");
  c.solver.delta = solver.number("delta", c.solver.delta);
  c.solver.M = as_int(solver.integer("M", c.solver.M), "solver.M");
  c.solver.tol = solver.number("tol", c.solver.tol);
  c.solver.max_r = as_int(solver.integer("max_r", c.solver.max_r), "solver.max_r");
  c.solver.max_time_radius = as_int(solver.integer("max_time_radius", c.solver.max_time_radius), "solver.max_time_radius");
  c.solver.cond_limit = solver.number("cond_limit", c.solver.cond_limit);
  c.solver.time_samples = as_int(solver.integer("time_samples", c.solver.time_samples), "solver.time_samples");
  c.solver.time_span = solver.number("time_span", c.solver.time_span);
  const Json& anchors = solver.array("anchors");
  if (anchors.empty()) throw ConfigError("E_NO_ANCHORS", "solver.anchors must list at least one anchor");
  for (std::size_t k = 0; k < anchors.size(); ++k) {
    Section a(anchors[k], "solver.anchors[" + std::to_string(k) + "]");
    if (!a.has("beta")) throw ConfigError("E_MISSING_SITE", "missing " + a.where("beta"));
    if (!a.has("a")) throw ConfigError("E_MISSING_AMPLITUDE", "missing " + a.where("a"));
    const IntVec beta = int_vector(a.raw("beta"), a.where("beta"));
    if (!a.raw("a").is_number()) throw ConfigError("E_TYPE", a.where("a") + " must be a real number");
    const double amp = a.number("a");
    a.reject_unknown();
    if (beta.size() != c.model.d) throw ConfigError("E_DIMENSION", a.where("beta") + " must have d entries");
    for (const auto& prev : c.anchors.beta)
      if (prev == beta) throw ConfigError("E_ANCHOR_DUPLICATE", "anchor site repeated: " + a.where("beta"));
    if (!(amp >= 1.0 && amp <= 2.0)) throw ConfigError("E_AMPLITUDE_RANGE", a.where("a") + " must lie in [1, 2]");
    if (linf_norm(beta) > c.box_radius) throw ConfigError("E_CAP", a.where("beta") + " lies outside the model box");
    c.anchors.beta.push_back(beta);
    c.anchors.a.push_back(amp);
  }
  if (solver.has("b") && solver.integer("b") != static_cast<long long>(c.anchors.b()))
    throw ConfigError("E_DIMENSION", "solver.b must equal the number of anchors");
  solver.reject_unknown();
  require(c.solver.p >= 1 && c.solver.p <= 4, "solver.p must lie in 1..4");
  require(c.solver.delta >= 0 && std::isfinite(c.solver.delta), "solver.delta must be finite and non-negative");
  require(c.solver.M >= 2, "solver.M must be at least 2");
  require(c.solver.tol > 0, "solver.tol must be positive");
  require(c.solver.max_r >= 1, "solver.max_r must be positive");
  require(c.solver.max_time_radius >= 1, "solver.max_time_radius must be positive");
  require(c.solver.cond_limit > 1, "solver.cond_limit must exceed 1");
  require(c.solver.time_samples >= 1 && c.solver.time_span > 0, "solver time sampling must be positive");
  {
    const long long newton_modes = 2 * box_volume(c.anchors.b(), c.solver.max_time_radius) * box_volume(c.model.d, c.box_radius);
    if (newton_modes > c.mode_cap) throw ConfigError("E_CAP", "Newton block exceeds mode_cap");
  }

  Section spectrum = top.child("spectrum");
  c.spectrum.theta_points = as_int(spectrum.integer("theta_points", c.spectrum.theta_points), "spectrum.theta_points");
  c.spectrum.covariance_shifts = as_int(spectrum.integer("covariance_shifts", c.spectrum.covariance_shifts), "spectrum.covariance_shifts");
  c.spectrum.diophantine_range = as_int(spectrum.integer("diophantine_range", c.spectrum.diophantine_range), "spectrum.diophantine_range");
  c.spectrum.tolerance = spectrum.number("tolerance", c.spectrum.tolerance);
  spectrum.reject_unknown();
  require(c.spectrum.theta_points >= 2, "spectrum.theta_points must be at least 2");
  require(c.spectrum.covariance_shifts >= 0, "spectrum.covariance_shifts must be non-negative");
  require(c.spectrum.diophantine_range >= 1, "spectrum.diophantine_range must be positive");
  require(c.spectrum.tolerance > 0, "spectrum.tolerance must be positive");

  Section sep = top.child("separation");
  c.separation.N = as_int(sep.integer("N", c.separation.N), "separation.N");
  c.separation.R = as_int(sep.integer("R", c.separation.R), "separation.R");
  c.separation.omega_scale_floor = as_int(sep.integer("omega_scale_floor", c.separation.omega_scale_floor), "separation.omega_scale_floor");
  c.separation.K2 = sep.number("K2", c.separation.K2);
  if (sep.has("monte_carlo_deltas"))
    c.separation.monte_carlo_deltas = number_list(sep.array("monte_carlo_deltas"), "separation.monte_carlo_deltas");
  c.separation.monte_carlo_samples = as_int(sep.integer("monte_carlo_samples", c.separation.monte_carlo_samples), "separation.monte_carlo_samples");
  c.separation.monte_carlo_box_radius = as_int(sep.integer("monte_carlo_box_radius", c.separation.monte_carlo_box_radius), "separation.monte_carlo_box_radius");
  sep.reject_unknown();
  require(c.separation.N >= 1 && c.separation.R >= 1, "separation.N and separation.R must be positive");
  require(c.separation.omega_scale_floor >= 1 && c.separation.K2 > 0, "separation omega ladder must be positive");
  require(c.separation.monte_carlo_samples >= 0, "separation.monte_carlo_samples must be non-negative");
  for (double d : c.separation.monte_carlo_deltas) require(d > 0 && d < 1, "Monte-Carlo deltas must lie in (0, 1)");
  if (c.separation.N > c.box_radius || c.separation.R > c.box_radius)
    throw ConfigError("E_CAP", "separation scan radius exceeds the model box");
  if (c.separation.monte_carlo_box_radius < std::max(c.separation.N, c.separation.R))
    throw ConfigError("E_CAP", "separation.monte_carlo_box_radius is smaller than the scan radius");

  Section probes = top.child("probes");
  if (probes.has("scales")) {
    c.probes.scales.clear();
    for (const auto& s : probes.array("scales")) {
      if (!s.is_number_integer()) throw ConfigError("E_TYPE", "probes.scales must hold integers");
      c.probes.scales.push_back(s.get<int>());
    }
  }
  c.probes.sigma_samples = as_int(probes.integer("sigma_samples", c.probes.sigma_samples), "probes.sigma_samples");
  if (probes.has("sigma_interval")) {
    const auto iv = number_list(probes.array("sigma_interval"), "probes.sigma_interval");
    if (iv.size() != 2) throw ConfigError("E_DIMENSION", "probes.sigma_interval must have two entries");
    c.probes.sigma_lo = iv[0];
    c.probes.sigma_hi = iv[1];
  }
  if (probes.has("j0"))
    for (const auto& j : probes.array("j0")) {
      const IntVec v = int_vector(j, "probes.j0");
      if (v.size() != c.model.d) throw ConfigError("E_DIMENSION", "probes.j0 entries must have d entries");
      c.probes.j0.push_back(v);
    }
  if (c.probes.j0.empty()) c.probes.j0.push_back(IntVec::Zero(c.model.d));
  c.probes.rate = probes.number("rate", c.probes.rate);
  c.probes.hilbert_schmidt = probes.boolean("hilbert_schmidt", c.probes.hilbert_schmidt);
  probes.reject_unknown();
  require(!c.probes.scales.empty(), "probes.scales must not be empty");
  require(c.probes.sigma_samples >= 1, "probes.sigma_samples must be positive");
  require(c.probes.sigma_hi > c.probes.sigma_lo, "probes.sigma_interval must be increasing");
  require(c.probes.rate > 0, "probes.rate must be positive");
  for (int N : c.probes.scales) {
    require(N >= 1, "probe scales must be positive");
    for (const auto& j : c.probes.j0)
      if (linf_norm(j) + N > c.box_radius) throw ConfigError("E_CAP", "probe region Λ_N(j0) leaves the model box");
    if (2 * box_volume(c.anchors.b() + c.model.d, N) > c.mode_cap) throw ConfigError("E_CAP", "probe region exceeds mode_cap");
  }

  c.seed = top.unsigned_integer("seed", c.seed);
  c.threads = as_int(top.integer("threads", c.threads), "threads");
  require(c.threads >= 1, "threads must be positive");
  Section output = top.child("output");
  c.output_directory = output.text("directory", c.output_directory);
  output.reject_unknown();
  top.reject_unknown();

  c.solver.seed = c.seed;
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError("E_READ", e.what());
  }
  return parse_config(text);
}

Json config_json(const ExperimentConfig& c) {
  Json anchors = Json::array();
  for (int k = 0; k < c.anchors.b(); ++k)
    anchors.push_back({{"beta", ivec_json(c.anchors.beta[static_cast<std::size_t>(k)])},
                       {"a", c.anchors.a[static_cast<std::size_t>(k)]}});
  Json j0 = Json::array();
  for (const auto& j : c.probes.j0) j0.push_back(ivec_json(j));
  return Json{
      {"model",
       {{"d", c.model.d},
        {"epsilon", c.model.eps},
        {"alpha", vec_json(c.model.alpha)},
        {"theta", c.model.theta},
        {"gamma", c.model.gamma},
        {"tau", c.model.tau},
        {"singularity_tol", c.model.singularity_tol},
        {"box_radius", c.box_radius}}},
      {"solver",
       {{"b", c.anchors.b()},
        {"p", c.solver.p},
        {"delta", c.solver.delta},
        {"M", c.solver.M},
        {"tol", c.solver.tol},
        {"max_r", c.solver.max_r},
        {"max_time_radius", c.solver.max_time_radius},
        {"cond_limit", c.solver.cond_limit},
        {"time_samples", c.solver.time_samples},
        {"time_span", c.solver.time_span},
        {"anchors", anchors}}},
      {"spectrum",
       {{"theta_points", c.spectrum.theta_points},
        {"covariance_shifts", c.spectrum.covariance_shifts},
        {"diophantine_range", c.spectrum.diophantine_range},
        {"tolerance", c.spectrum.tolerance}}},
      {"separation",
       {{"N", c.separation.N},
        {"R", c.separation.R},
        {"omega_scale_floor", c.separation.omega_scale_floor},
        {"K2", c.separation.K2},
        {"monte_carlo_deltas", c.separation.monte_carlo_deltas},
        {"monte_carlo_samples", c.separation.monte_carlo_samples},
        {"monte_carlo_box_radius", c.separation.monte_carlo_box_radius}}},
      {"probes",
       {{"scales", c.probes.scales},
        {"sigma_samples", c.probes.sigma_samples},
        {"sigma_interval", {c.probes.sigma_lo, c.probes.sigma_hi}},
        {"j0", j0},
        {"rate", c.probes.rate},
        {"hilbert_schmidt", c.probes.hilbert_schmidt}}},
      {"seed", c.seed},
      {"threads", c.threads},
      {"mode_cap", c.mode_cap},
      {"output", {{"directory", c.output_directory}}}};
}

}  // namespace maryland::cli
