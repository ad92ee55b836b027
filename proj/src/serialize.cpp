#include "maryland/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maryland {

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json vec_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(number(v(k)));
  return a;
}

Json vec_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

Json ivec_json(const IntVec& v) {
  Json a = Json::array();
  for (Index k = 0; k < v.size(); ++k) a.push_back(v(k));
  return a;
}

IntVec ivec_from_json(const Json& j) {
  IntVec v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = j[k].get<int>();
  return v;
}

Eigen::VectorXd vec_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k)
    v(static_cast<Index>(k)) = j[k].is_null() ? std::nan("") : j[k].get<double>();
  return v;
}

Json params_json(const MarylandParams& p) {
  return Json{{"d", p.d},         {"epsilon", number(p.eps)}, {"alpha", vec_json(p.alpha)},
              {"theta", number(p.theta)}, {"gamma", number(p.gamma)}, {"tau", number(p.tau)},
              {"singularity_tol", number(p.singularity_tol)}};
}

MarylandParams params_from_json(const Json& j) {
  MarylandParams p;
  p.d = j.at("d").get<int>();
  p.eps = j.at("epsilon").get<double>();
  p.alpha = vec_from_json(j.at("alpha"));
  p.theta = j.at("theta").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.tau = j.at("tau").get<double>();
  p.singularity_tol = j.at("singularity_tol").get<double>();
  return p;
}

Json eigensystem_json(const EigenSystem& es) {
  Json sites = Json::array(), centers = Json::array();
  for (const auto& s : es.sites) sites.push_back(ivec_json(s));
  for (const auto& c : es.centers) centers.push_back(ivec_json(c));
  Json phi = Json::array();
  for (Index k = 0; k < es.phi.size(); ++k) phi.push_back(es.phi.data()[k]);
  Json affected = Json::array();
  for (char c : es.boundary_affected) affected.push_back(c != 0);
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "eigensystem"},
              {"params", params_json(es.params)},
              {"box", {{"center", ivec_json(es.box.center)}, {"radius", es.box.size}}},
              {"sites", sites},
              {"eigenvalues", vec_json(es.mu)},
              {"vectors", {{"rows", es.phi.rows()}, {"cols", es.phi.cols()}, {"order", "column-major"}, {"data", phi}}},
              {"centers", centers},
              {"peak", vec_json(es.peak)},
              {"boundary_distance", es.boundary_distance},
              {"boundary_affected", affected},
              {"matching",
               {{"radius", es.matching.radius},
                {"perfect_within_radius", es.matching.perfect_within_radius},
                {"fallback_used", es.matching.fallback_used},
                {"off_center_labels", es.matching.off_center_labels}}}};
}

EigenSystem eigensystem_from_json(const Json& j) {
  if (j.value("schema_version", 0) != kSchemaVersion || j.value("kind", "") != "eigensystem")
    throw std::runtime_error("not an eigensystem document of this schema version");
  EigenSystem es;
  es.params = params_from_json(j.at("params"));
  es.box = Region::box(ivec_from_json(j.at("box").at("center")), j.at("box").at("radius").get<int>());
  es.indexer = BoxIndexer(es.params.d, es.box.size, es.box.center);
  for (const auto& s : j.at("sites")) es.sites.push_back(ivec_from_json(s));
  es.mu = vec_from_json(j.at("eigenvalues"));
  const auto& v = j.at("vectors");
  es.phi.resize(v.at("rows").get<Index>(), v.at("cols").get<Index>());
  const auto& data = v.at("data");
  if (static_cast<Index>(data.size()) != es.phi.size()) throw std::runtime_error("eigenvector array has wrong length");
  for (Index k = 0; k < es.phi.size(); ++k) es.phi.data()[k] = data[static_cast<std::size_t>(k)].get<double>();
  for (const auto& c : j.at("centers")) es.centers.push_back(ivec_from_json(c));
  es.peak = vec_from_json(j.at("peak"));
  es.boundary_distance = j.at("boundary_distance").get<std::vector<int>>();
  for (const auto& a : j.at("boundary_affected")) es.boundary_affected.push_back(a.get<bool>() ? 1 : 0);
  const auto& m = j.at("matching");
  es.matching.radius = m.at("radius").get<int>();
  es.matching.perfect_within_radius = m.at("perfect_within_radius").get<bool>();
  es.matching.fallback_used = m.at("fallback_used").get<bool>();
  es.matching.off_center_labels = m.at("off_center_labels").get<int>();
  if (es.mu.size() != es.size() || es.phi.cols() != es.size()) throw std::runtime_error("eigensystem sizes disagree");
  return es;
}

Json predicate_json(const PredicateEntry& e) {
  Json w = Json::array();
  for (const auto& [name, v] : e.witness) w.push_back({{"name", name}, {"value", ivec_json(v)}});
  Json out{{"id", e.id},
           {"holds", e.holds},
           {"value", number(e.value)},
           {"threshold", number(e.threshold)},
           {"margin", number(e.margin)},
           {"witness", w},
           {"range", e.range},
           {"scanned", e.scanned}};
  if (e.id == "magnitude") {
    out["max_value"] = number(e.max_value);
    out["upper_threshold"] = number(e.upper_threshold);
    out["lower_holds"] = e.lower_holds;
    out["upper_holds"] = e.upper_holds;
  }
  if (e.id == "second-melnikov") {
    out["trivial_degenerate"] = e.trivial_degenerate;
    out["holds_excluding_trivial"] = e.holds_excluding_trivial;
    out["value_excluding_trivial"] = number(e.value_excluding_trivial);
  }
  if (e.scale != 0) out["scale"] = e.scale;
  return out;
}

Json separation_json(const SeparationReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries) entries.push_back(predicate_json(e));
  return Json{{"all_hold", r.all_hold()}, {"entries", entries}};
}

Json diophantine_json(const DiophantineReport& r) {
  return Json{{"holds", r.holds},
              {"witness", ivec_json(r.witness)},
              {"torus_distance", number(r.torus_distance)},
              {"margin", number(r.margin)},
              {"j_max", r.j_max}};
}

Json profile_json(const ProfileReport& r) {
  return Json{{"points", r.theta.size()},
              {"max_potential_deviation", number(r.max_potential_deviation)},
              {"min_decrease_slope", number(r.min_decrease_slope)},
              {"monotone", r.monotone}};
}

Json coeffs_json(const Coeffs& u) {
  Json rows = Json::array();
  for (Index t = 0; t < u.time_size(); ++t) {
    const IntVec n = u.time_index().decode(t);
    for (Index s = 0; s < u.space_size(); ++s) {
      const Complex c = u.values()(t, s);
      if (c == Complex(0.0, 0.0)) continue;
      rows.push_back({ivec_json(n), ivec_json(u.space_index().decode(s)), c.real(), c.imag()});
    }
  }
  return Json{{"b", u.b()},
              {"d", u.d()},
              {"time_radius", u.time_radius()},
              {"space_radius", u.space_radius()},
              {"entries", rows}};
}

namespace {

Json decay_json(const DecayFitResult& d) {
  return Json{{"bound", number(d.bound)},
              {"rho_star", number(d.rho_star)},
              {"any_pass", d.any_pass},
              {"sum_at_rho_star", number(d.sum_at_rho_star)},
              {"slope", number(d.slope)},
              {"points", d.points},
              {"rho_grid", vec_json(d.rho_grid)},
              {"weighted_sums", vec_json(d.weighted_sums)}};
}

Json ldt_scale_json(const LdtScaleReport& s) {
  Json centers = Json::array();
  for (const auto& c : s.j0) centers.push_back(ivec_json(c));
  return Json{{"N", s.N},
              {"j0", centers},
              {"sigma_samples", s.samples},
              {"sigma_seed", s.seed},
              {"sigma_interval", {number(s.sigma_lo), number(s.sigma_hi)}},
              {"rate", number(s.rate)},
              {"norm_kind", s.norm_kind},
              {"closed_form", s.closed_form},
              {"region_modes", s.region_modes},
              {"components", s.components},
              {"norm_threshold", number(s.norm_threshold)},
              {"measure_bound", number(s.measure_bound)},
              {"fraction_norm_failed", number(s.fraction_norm_failed)},
              {"fraction_decay_failed", number(s.fraction_decay_failed)},
              {"fraction_failed", number(s.fraction_failed)},
              {"failing_sigma", vec_json(s.failing_sigma)},
              {"rate_fit",
               {{"insufficient_range", s.rate_insufficient},
                {"min", number(s.rate_min)},
                {"median", number(s.rate_median)},
                {"max", number(s.rate_max)}}}};
}

}  // namespace

Json solution_json(const SolutionReport& r, const ResonantSet& S) {
  Json anchors = Json::array();
  for (int k = 0; k < S.b(); ++k)
    anchors.push_back({{"beta", ivec_json(S.beta[static_cast<std::size_t>(k)])}, {"a", S.a[static_cast<std::size_t>(k)]}});
  return Json{{"converged", r.converged},
              {"iterations", r.iterations},
              {"anchors", anchors},
              {"omega", vec_json(r.omega)},
              {"omega0", vec_json(r.omega0)},
              {"omega_first", vec_json(r.omega_first)},
              {"A", vec_json(r.A)},
              {"residual_history", vec_json(r.residual_history)},
              {"correction_history", vec_json(r.correction_history)},
              {"condition_history", vec_json(r.condition_history)},
              {"scale_history", r.scale_history},
              {"anchors_held", r.anchors_held},
              {"block_growth", r.block_growth},
              {"monotone_decay", r.monotone_decay},
              {"quadratic_slope", number(r.quadratic_slope)},
              {"max_conjugate_mismatch", number(r.max_conjugate_mismatch)},
              {"decay", decay_json(r.decay)},
              {"time_residual", {{"samples", r.time.times.size()}, {"max", number(r.time.max_residual)}}},
              {"u", coeffs_json(r.u)}};
}

Json ldt_json(const LdtProbeReport& r) {
  Json scales = Json::array(), mono = Json::array();
  for (const auto& s : r.scales) scales.push_back(ldt_scale_json(s));
  for (const auto& m : r.monotonicity)
    mono.push_back({{"N_small", m.N_small},
                    {"N_large", m.N_large},
                    {"fraction_small", number(m.fraction_small)},
                    {"fraction_large", number(m.fraction_large)},
                    {"margin", number(m.margin)},
                    {"holds", m.holds}});
  return Json{{"scales", scales}, {"monotonicity", mono}, {"monotone", r.monotone()}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) out += (k ? "," : "") + header[k];
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out += (k ? "," : "") + format_double(row[k]);
    out += '\n';
  }
  return out;
}

std::string monte_carlo_csv(const std::vector<MonteCarloRow>& rows) {
  std::string out = "delta,epsilon,fraction_failed,n_samples,seed\n";
  for (const auto& r : rows)
    out += format_double(r.delta) + "," + format_double(r.epsilon) + "," + format_double(r.fraction_failed) + "," +
           std::to_string(r.n_samples) + "," + std::to_string(r.seed) + "\n";
  return out;
}

std::string profile_csv(const ProfileReport& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.theta.size(); ++k) rows.push_back({r.theta[k], r.energy[k]});
  return csv_table({"theta", "energy"}, rows);
}

std::string decay_csv(const Coeffs& u) {
  std::vector<std::vector<double>> rows;
  for (Index t = 0; t < u.time_size(); ++t) {
    const int nn = linf_norm(u.time_index().decode(t));
    for (Index s = 0; s < u.space_size(); ++s) {
      const double a = std::abs(u.values()(t, s));
      if (a == 0.0) continue;
      rows.push_back({static_cast<double>(nn + linf_norm(u.space_index().decode(s))), std::log(a)});
    }
  }
  return csv_table({"distance", "log_abs_u"}, rows);
}

std::string time_residual_csv(const TimeResidual& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < r.times.size(); ++k) rows.push_back({r.times[k], r.per_time[k]});
  return csv_table({"t", "max_residual"}, rows);
}

std::string ldt_witness_csv(const LdtProbeReport& r) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : r.scales)
    for (const auto& x : s.per_sample)
      rows.push_back({static_cast<double>(s.N), x.sigma, x.inv_norm, x.decay_excess, x.norm_ok ? 1.0 : 0.0,
                      x.decay_ok ? 1.0 : 0.0, x.rate});
  return csv_table({"N", "sigma", "inv_norm", "decay_excess", "norm_ok", "decay_ok", "rate"}, rows);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace maryland
