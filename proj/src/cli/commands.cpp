#include "maryland/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <map>

#include "maryland/errors.hpp"
#include "maryland/rng.hpp"

namespace maryland::cli {

namespace fs = std::filesystem;

namespace {

// Run location and thread count do not affect results, so artifacts leave them out.
Json header(const std::string& kind, const ExperimentConfig& c) {
  Json cfg = config_json(c);
  cfg.erase("output");
  cfg.erase("threads");
  return Json{{"schema_version", kSchemaVersion}, {"kind", kind}, {"config", cfg}};
}

void emit(CommandResult& r, const std::string& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  write_text((fs::path(dir) / name).string(), text);
  r.artifacts.push_back(name);
}

EigenSystem model_eigensystem(const ExperimentConfig& c) {
  return diagonalize_and_relabel(c.model, Region::box(c.model.d, c.box_radius));
}

void check(CommandResult& r, Json& checks, const std::string& name, double value, double limit) {
  const bool ok = value <= limit;
  checks[name] = {{"value", number(value)}, {"limit", number(limit)}, {"holds", ok}};
  if (!ok) r.violations.push_back(name);
}

SolutionReport solve_model(const ExperimentConfig& c, const EigenSystem& es) {
  return cwb_solve(es, c.anchors, c.solver);
}

}  // namespace

CommandResult cmd_spectrum(const ExperimentConfig& c, const std::string& dir) {
  CommandResult r;
  const EigenSystem es = model_eigensystem(c);
  const double tol = c.spectrum.tolerance;
  Json checks = Json::object();

  const EigenResidualReport er = eigen_residuals(es);
  check(r, checks, "eigen_residual", er.max_residual, tol);
  check(r, checks, "orthogonality", er.orthogonality_defect, tol);

  const DiophantineReport dio = diophantine_check(c.model.alpha, c.model.gamma, c.model.tau, c.spectrum.diophantine_range);
  if (!dio.holds) r.warnings.push_back("diophantine condition fails on alpha");

  // The profile bounds are only guaranteed for Diophantine α; otherwise a failure is a warning.
  const ProfileReport prof = eigenvalue_profile(c.model, c.box_radius, midpoint_grid(c.spectrum.theta_points));
  const std::size_t before = r.violations.size();
  check(r, checks, "potential_approximation", prof.max_potential_deviation, 2.0 * c.model.d * c.model.eps + 1e-12);
  checks["profile_monotone"] = {{"holds", prof.monotone}, {"min_decrease_slope", number(prof.min_decrease_slope)}};
  if (!prof.monotone) r.violations.push_back("profile_monotone");
  if (!dio.holds) {
    for (std::size_t k = before; k < r.violations.size(); ++k)
      r.warnings.push_back(r.violations[k] + " fails (alpha not Diophantine)");
    r.violations.resize(before);
  }

  const SymmetryReport sym = check_symmetry(c.model, Region::box(c.model.d, c.box_radius));
  check(r, checks, "symmetry", sym.defect, tol);

  Rng rng(c.seed, "covariance-shift");
  const int cov_radius = std::min(c.box_radius, c.model.d == 1 ? 15 : 5);
  double cov = 0.0;
  Json shifts = Json::array();
  for (int k = 0; k < c.spectrum.covariance_shifts; ++k) {
    IntVec m(c.model.d);
    for (int i = 0; i < c.model.d; ++i) m(i) = static_cast<int>(rng.integer(-20, 20));
    shifts.push_back(ivec_json(m));
    cov = std::max(cov, check_translation_covariance(c.model, cov_radius, m));
  }
  check(r, checks, "translation_covariance", cov, tol);

  const auto fits = interior_decay(es, 4);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& f : fits) worst = std::max(worst, f.slope);

  Json report = header("spectrum_report", c);
  report["checks"] = checks;
  report["covariance_shifts"] = shifts;
  report["predicates"] = {{"diophantine", dio.holds ? "passed" : "failed"}, {"detail", diophantine_json(dio)}};
  report["profile"] = profile_json(prof);
  report["localization"] = {{"interior_labels", fits.size()}, {"worst_decay_slope", number(worst)}};
  report["matching"] = {{"perfect_within_radius", es.matching.perfect_within_radius},
                        {"fallback_used", es.matching.fallback_used},
                        {"off_center_labels", es.matching.off_center_labels}};
  report["warnings"] = r.warnings;
  report["violations"] = r.violations;

  Json eig = eigensystem_json(es);
  emit(r, dir, "eigensystem.json", dump(eig));
  emit(r, dir, "profile.csv", profile_csv(prof));
  emit(r, dir, "spectrum_report.json", dump(report));
  r.exit_code = r.violations.empty() ? kSuccess : kInvariantViolation;
  return r;
}

CommandResult cmd_separation(const ExperimentConfig& c, const std::string& dir) {
  CommandResult r;
  const EigenSystem es = model_eigensystem(c);
  const double delta = c.solver.delta > 0 ? c.solver.delta : 1e-3;
  const SeparationReport sep = separation_report(es, c.anchors.beta, c.separation.N, c.separation.R, delta);
  const Eigen::VectorXd w0 = omega_zero(es, c.anchors.beta);
  const auto omega_entries = check_omega_hypotheses(es, w0, c.separation.N, c.separation.omega_scale_floor, c.separation.K2);
  Json omega = Json::array();
  for (const auto& e : omega_entries) omega.push_back(predicate_json(e));

  std::vector<MonteCarloRow> rows;
  if (c.separation.monte_carlo_samples > 0) {
    ThetaSweepOptions opt;
    opt.box_radius = c.separation.monte_carlo_box_radius;
    opt.N = c.separation.N;
    opt.R = c.separation.R;
    opt.samples = c.separation.monte_carlo_samples;
    opt.threads = c.threads;
    for (std::size_t k = 0; k < c.separation.monte_carlo_deltas.size(); ++k)
      rows.push_back(theta_monte_carlo(c.model, c.anchors.beta, c.separation.monte_carlo_deltas[k], opt,
                                       derive_seed(c.seed, "monte-carlo-" + std::to_string(k))));
  }

  Json report = header("separation", c);
  report["delta"] = delta;
  report["melnikov_threshold"] = melnikov_threshold(delta);
  report["omega0"] = vec_json(w0);
  report["separation"] = separation_json(sep);
  report["omega_hypotheses"] = omega;
  emit(r, dir, "separation.json", dump(report));
  if (!rows.empty()) emit(r, dir, "monte_carlo.csv", monte_carlo_csv(rows));
  return r;
}

CommandResult cmd_solve(const ExperimentConfig& c, const std::string& dir) {
  CommandResult r;
  const EigenSystem es = model_eigensystem(c);
  const double delta = c.solver.delta > 0 ? c.solver.delta : 1e-3;
  const SeparationReport pre = separation_report(es, c.anchors.beta, std::min(c.separation.N, c.box_radius),
                                                 std::min(c.separation.R, c.box_radius), delta);
  if (!pre.all_hold()) r.warnings.push_back("pre-flight separation predicates fail");
  const SolutionReport sol = solve_model(c, es);
  if (!sol.anchors_held) r.violations.push_back("anchors_held");

  Json report = header("solution", c);
  report["preflight"] = separation_json(pre);
  report["solution"] = solution_json(sol, c.anchors);
  report["warnings"] = r.warnings;
  report["violations"] = r.violations;
  emit(r, dir, "solution.json", dump(report));
  emit(r, dir, "decay.csv", decay_csv(sol.u));
  emit(r, dir, "time_residual.csv", time_residual_csv(sol.time));
  r.exit_code = r.violations.empty() ? kSuccess : kInvariantViolation;
  return r;
}

CommandResult cmd_ldt(const ExperimentConfig& c, const std::string& dir) {
  CommandResult r;
  const EigenSystem es = model_eigensystem(c);
  const SolutionReport sol = solve_model(c, es);
  LdtOptions opt;
  opt.scales = c.probes.scales;
  opt.j0 = c.probes.j0;
  opt.sigma_samples = c.probes.sigma_samples;
  opt.sigma_lo = c.probes.sigma_lo;
  opt.sigma_hi = c.probes.sigma_hi;
  opt.rate = c.probes.rate;
  opt.seed = c.seed;
  opt.hilbert_schmidt = c.probes.hilbert_schmidt;
  opt.threads = c.threads;
  opt.mode_cap = c.mode_cap;
  const LdtProbeReport probe = ldt_probe(sol.u, es, sol.omega, c.solver.delta, c.solver.p, opt);

  Json report = header("ldt", c);
  report["solution"] = {{"iterations", sol.iterations},
                        {"residual", number(sol.residual_history.empty() ? 0.0 : sol.residual_history.back())},
                        {"omega", vec_json(sol.omega)}};
  report["probe"] = ldt_json(probe);
  emit(r, dir, "ldt.json", dump(report));
  emit(r, dir, "ldt_witness.csv", ldt_witness_csv(probe));
  return r;
}

namespace {

// Scalar leaves with dotted keys; arrays longer than `max_array` are summarised by their length.
void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out,
             std::size_t max_array = 8) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out, max_array);
  } else if (j.is_array()) {
    if (j.size() > max_array) {
      out.emplace_back(prefix + ".length", std::to_string(j.size()));
      return;
    }
    for (std::size_t k = 0; k < j.size(); ++k) flatten(j[k], prefix + "[" + std::to_string(k) + "]", out, max_array);
  } else if (j.is_number_float()) {
    out.emplace_back(prefix, format_double(j.get<double>()));
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

}  // namespace

CommandResult cmd_report(const std::string& dir) {
  static const std::vector<std::pair<std::string, std::string>> known = {
      {"spectrum", "spectrum_report.json"}, {"separation", "separation.json"},
      {"solution", "solution.json"},        {"ldt", "ldt.json"}};
  CommandResult r;
  std::vector<std::pair<std::string, Json>> docs;
  for (const auto& [section, file] : known) {
    const fs::path path = fs::path(dir) / file;
    if (!fs::exists(path)) continue;
    Json j;
    try {
      j = Json::parse(read_text(path.string()));
    } catch (const std::exception& e) {
      throw CorruptArtifact(path.string(), e.what());
    }
    if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion)
      throw CorruptArtifact(path.string(), "missing or unsupported schema_version");
    docs.emplace_back(section, std::move(j));
  }
  if (docs.empty()) throw MissingArtifacts(dir);

  std::string md = "# Run summary\n\n";
  std::string csv = "section,key,value\n";
  for (const auto& [section, j] : docs) {
    std::vector<std::pair<std::string, std::string>> rows;
    for (const auto& [k, v] : j.items())
      if (k != "config" && k != "schema_version" && k != "kind") flatten(v, k, rows);
    md += "## " + section + "\n\n| key | value |\n|---|---|\n";
    for (const auto& [k, v] : rows) {
      md += "| " + k + " | " + v + " |\n";
      csv += section + "," + csv_field(k) + "," + csv_field(v) + "\n";
    }
    md += "\n";
  }
  emit(r, dir, "summary.md", md);
  emit(r, dir, "summary.csv", csv);
  return r;
}

namespace {

Json failure_doc(const std::string& verb, int code, const std::string& error, const std::string& message) {
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "failure"},
              {"command", verb},
              {"exit_code", code},
              {"error", error},
              {"message", message}};
}

void write_failure(const std::string& dir, const std::string& verb, const Json& doc, std::ostream& log) {
  if (dir.empty()) return;
  try {
    fs::create_directories(dir);
    write_text((fs::path(dir) / ("failure_" + verb + ".json")).string(), dump(doc));
  } catch (const std::exception& e) {
    log << "could not write failure report: " << e.what() << "\n";
  }
}

}  // namespace

int run_command(const std::string& verb, const std::string& config_path, const Overrides& o, std::ostream& log) {
  static const std::map<std::string, CommandResult (*)(const ExperimentConfig&, const std::string&)> verbs = {
      {"spectrum", cmd_spectrum}, {"separation", cmd_separation}, {"solve", cmd_solve}, {"ldt", cmd_ldt}};

  if (verb == "report") {
    const std::string dir = o.out ? *o.out : config_path;
    try {
      const CommandResult r = cmd_report(dir);
      for (const auto& a : r.artifacts) log << "wrote " << (fs::path(dir) / a).string() << "\n";
      return kSuccess;
    } catch (const MissingArtifacts& e) {
      log << "error: " << e.what() << "\n";
      return kConfigError;
    } catch (const CorruptArtifact& e) {
      log << "error: " << e.what() << "\n";
      return kConfigError;
    }
  }

  const auto it = verbs.find(verb);
  if (it == verbs.end()) {
    log << "error: unknown command " << verb << "\n";
    return kConfigError;
  }

  ExperimentConfig c;
  try {
    c = load_config(config_path);
    if (o.seed) {
      c.seed = *o.seed;
      c.solver.seed = *o.seed;
    }
    if (o.threads) {
      if (*o.threads < 1) throw ConfigError("E_RANGE", "--threads must be positive");
      c.threads = *o.threads;
    }
    if (o.out) c.output_directory = *o.out;
  } catch (const ConfigError& e) {
    log << "config error [" << e.code << "]: " << e.what() << "\n";
    write_failure(o.out.value_or(""), verb, failure_doc(verb, kConfigError, e.code, e.what()), log);
    return kConfigError;
  }

  const std::string dir = c.output_directory;
  try {
    const CommandResult r = it->second(c, dir);
    for (const auto& a : r.artifacts) log << "wrote " << (fs::path(dir) / a).string() << "\n";
    for (const auto& w : r.warnings) log << "warning: " << w << "\n";
    for (const auto& v : r.violations) log << "invariant violated: " << v << "\n";
    if (r.exit_code != kSuccess) {
      Json doc = failure_doc(verb, r.exit_code, "InvariantViolation", "hard invariants failed");
      doc["violations"] = r.violations;
      write_failure(dir, verb, doc, log);
    }
    return r.exit_code;
  } catch (const DidNotConverge& e) {
    Json doc = failure_doc(verb, kConvergenceFailure, "DidNotConverge", e.what());
    doc["residual_history"] = vec_json(e.history);
    write_failure(dir, verb, doc, log);
    log << "error: " << e.what() << "\n";
    return kConvergenceFailure;
  } catch (const IllConditioned& e) {
    write_failure(dir, verb, failure_doc(verb, kConvergenceFailure, "IllConditioned", e.what()), log);
    log << "error: " << e.what() << "\n";
    return kConvergenceFailure;
  } catch (const NoProgress& e) {
    write_failure(dir, verb, failure_doc(verb, kConvergenceFailure, "NoProgress", e.what()), log);
    log << "error: " << e.what() << "\n";
    return kConvergenceFailure;
  } catch (const std::exception& e) {
    write_failure(dir, verb, failure_doc(verb, kInvariantViolation, "Error", e.what()), log);
    log << "error: " << e.what() << "\n";
    return kInvariantViolation;
  }
}

}  // namespace maryland::cli
