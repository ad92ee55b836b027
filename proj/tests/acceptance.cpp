// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "maryland/errors.hpp"
#include "maryland/green.hpp"
#include "maryland/newton.hpp"
#include "maryland/nonlinear.hpp"
#include "maryland/rng.hpp"
#include "maryland/serialize.hpp"
#include "maryland/spectrum.hpp"
#include "oracles.hpp"

using namespace maryland;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

MarylandParams params(int d, double eps, double theta) {
  MarylandParams p;
  p.d = d;
  p.eps = eps;
  p.theta = theta;
  p.alpha.resize(d);
  if (d == 1)
    p.alpha << golden_frequency();
  else if (d == 2)
    p.alpha << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0;
  else
    p.alpha << std::sqrt(2.0) - 1.0, std::sqrt(3.0) - 1.0, std::sqrt(5.0) - 2.0;
  if (d > 1) p.tau = d + 1.0;
  return p;
}

struct Desk {
  EigenSystem es;
  ResonantSet S;
  SolverConfig cfg;
  SolutionReport rep;
};

const Desk& desk() {
  static const Desk D = [] {
    Desk d;
    d.es = diagonalize_and_relabel(params(1, 0.02, 0.3), Region::box(1, 15));
    d.S.beta = {IntVec::Zero(1)};
    d.S.a = {1.3};
    d.cfg.delta = 1e-3;
    d.cfg.M = 3;
    d.cfg.tol = 1e-10;
    d.cfg.max_r = 8;
    d.cfg.seed = 11;
    d.rep = cwb_solve(d.es, d.S, d.cfg);
    return d;
  }();
  return D;
}

Outcome potential_approximation() {
  double worst_ratio = 0;
  for (double eps : {0.01, 0.05}) {
    const ProfileReport r = eigenvalue_profile(params(1, eps, 0.0), 15, midpoint_grid(400));
    worst_ratio = std::max(worst_ratio, r.max_potential_deviation / (2.0 * eps));
  }
  return {worst_ratio <= 1.0, "max |E - cot| / (2 d eps) = " + fmt("%.3g", worst_ratio)};
}

Outcome symmetry_exactness() {
  Rng rng(1, "symmetry");
  double worst = 0;
  int instances = 0, skipped = 0;
  for (int d : {1, 2})
    for (int k = 0; k < 10;) {
      const double theta = rng.uniform(), eps = rng.uniform(0.0, 0.1);
      const int radius = static_cast<int>(rng.integer(1, 12));
      try {
        worst = std::max(worst, check_symmetry(params(d, eps, theta), Region::box(d, radius)).defect);
        ++k;
        ++instances;
      } catch (const SingularPhase&) {
        ++skipped;
      }
    }
  return {worst <= 1e-10, std::to_string(instances) + " instances, max Hausdorff defect " + fmt("%.2e", worst) +
                              ", pole draws redrawn " + std::to_string(skipped)};
}

Outcome translation_covariance() {
  Rng rng(2, "covariance");
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int d = k % 2 ? 2 : 1;
    IntVec m(d);
    for (int i = 0; i < d; ++i) m(i) = static_cast<int>(rng.integer(-40, 40));
    const MarylandParams p = params(d, rng.uniform(0.0, 0.1), rng.uniform());
    worst = std::max(worst, check_translation_covariance(p, d == 1 ? 10 : 4, m));
  }
  return {worst <= 1e-10, "20 shifts, max discrepancy " + fmt("%.2e", worst)};
}

Outcome localization() {
  const double eps = 0.02;
  const EigenSystem es = diagonalize_and_relabel(params(1, eps, 0.3), Region::box(1, 14));
  const auto fits = interior_decay(es, 4);
  double worst_peak = 0, worst_slope = -1e300;
  for (const auto& f : fits) {
    worst_peak = std::max(worst_peak, std::abs(es.peak(es.slot(f.site)) - 1.0));
    worst_slope = std::max(worst_slope, f.slope);
  }
  const double slope_bound = -0.4 * std::abs(std::log(eps));
  const bool ok = !fits.empty() && worst_peak < std::sqrt(eps) && worst_slope <= slope_bound;
  return {ok, std::to_string(fits.size()) + " interior labels, max |phi_j(j)-1| " + fmt("%.2e", worst_peak) +
                  ", worst slope " + fmt("%.3f", worst_slope) + " vs " + fmt("%.3f", slope_bound)};
}

Outcome linearization_correctness() {
  Rng rng(3, "linearization");
  double worst = 0;
  bool toeplitz = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int p = trial % 2 ? 2 : 1;
    const EigenSystem es =
        diagonalize_and_relabel(params(1, rng.uniform(0.01, 0.05), rng.uniform(0.05, 0.95)), Region::box(1, 3));
    const Coeffs u = oracle::random_coeffs(rng, 1, 1, 1, 3, 0.6);
    const Coeffs v = oracle::random_coeffs(rng, 1, 1, 1, 3, 0.6);
    const int R = (2 * p + 1);
    const ModeList modes = enumerate_region(Region::generalized(IntVec::Zero(2), (IntVec(2) << R, 3).finished(),
                                                                (IntVec(2) << 100, 0).finished()),
                                            1);
    const Eigen::MatrixXcd W = coupling_matrix(linearization_fields(u, v, es, p), es, modes);

    const double h = 1e-5;
    for (Index col = 0; col < modes.size(); ++col) {
      const ModeIndex& m = modes[col];
      if (linf_norm(m.n) > 1) continue;
      Coeffs up = u, um = u, vp = v, vm = v;
      if (m.sign == Sector::plus) {
        up.set(m.n, m.j, u.u(m.n, m.j) + h);
        um.set(m.n, m.j, u.u(m.n, m.j) - h);
      } else {
        vp.set(m.n, m.j, v.u(m.n, m.j) + h);
        vm.set(m.n, m.j, v.u(m.n, m.j) - h);
      }
      const Coeffs Wp = nonlinear_term_uv(up, vp, es, p), Wm = nonlinear_term_uv(um, vm, es, p);
      const Coeffs Tp = nonlinear_term_uv(vp, up, es, p), Tm = nonlinear_term_uv(vm, um, es, p);
      double scale = 1.0;
      for (Index row = 0; row < modes.size(); ++row) scale = std::max(scale, std::abs(W(row, col)));
      for (Index row = 0; row < modes.size(); ++row) {
        const ModeIndex& r = modes[row];
        const Complex fd = r.sign == Sector::plus ? (Wp.u(r.n, r.j) - Wm.u(r.n, r.j)) / (2 * h)
                                                  : (Tp.u(r.n, r.j) - Tm.u(r.n, r.j)) / (2 * h);
        worst = std::max(worst, std::abs(fd - W(row, col)) / scale);
      }
    }
    for (int k = 0; k < 20; ++k) {
      const IntVec shift = IntVec::Constant(1, static_cast<int>(rng.integer(-2, 2)));
      for (Index a = 0; a < modes.size(); ++a)
        for (Index b = 0; b < modes.size(); ++b) {
          const Index a2 = modes.find(modes[a].sign, modes[a].n + shift, modes[a].j);
          const Index b2 = modes.find(modes[b].sign, modes[b].n + shift, modes[b].j);
          if (a2 >= 0 && b2 >= 0 && W(a, b) != W(a2, b2)) toeplitz = false;
        }
    }
  }
  return {worst <= 1e-6 && toeplitz, "max relative FD mismatch " + fmt("%.2e", worst) +
                                         (toeplitz ? ", shift identity exact" : ", shift identity broken")};
}

Outcome nonlinearity_oracle() {
  Rng rng(4, "nonlinearity");
  double worst = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int p = trial % 3 == 2 ? 2 : 1;
    const int d = trial % 5 == 4 ? 2 : 1;
    const int radius = d == 2 ? 1 : (p == 2 ? 2 : static_cast<int>(rng.integer(1, 3)));
    const int T = p == 2 || d == 2 ? 1 : static_cast<int>(rng.integer(1, 3));
    const EigenSystem es =
        diagonalize_and_relabel(params(d, rng.uniform(0.01, 0.08), rng.uniform(0.05, 0.95)), Region::box(d, radius));
    const Coeffs u = oracle::random_coeffs(rng, 1, d, T, radius, 1.0, 0.7);
    const Coeffs v = u.conjugate_sector();
    const Coeffs fast = nonlinear_term(u, es, p);
    const Coeffs slow = oracle::brute_force_W(u, v, es, p);
    double scale = 1.0, diff = 0;
    for (Index t = 0; t < slow.time_size(); ++t)
      for (Index s = 0; s < slow.space_size(); ++s) {
        const IntVec n = slow.time_index().decode(t), j = slow.space_index().decode(s);
        scale = std::max(scale, std::abs(slow.u(n, j)));
        diff = std::max(diff, std::abs(slow.u(n, j) - fast.u(n, j)));
      }
    worst = std::max(worst, diff / scale);
  }
  return {worst <= 1e-12, "25 trials, max relative mismatch " + fmt("%.2e", worst)};
}

Outcome q_equation() {
  const Desk& D = desk();
  const double eps = 0.02, delta = D.cfg.delta;
  const Coeffs u0 = D.S.initial(1, 1, D.es.radius());
  const Eigen::VectorXd w1 = q_update(u0, D.es, delta, 1, D.S);
  const double mu = D.es.eigenvalue(D.S.beta[0]);
  const double A = D.es.phi.col(D.es.slot(D.S.beta[0])).array().pow(4).sum();
  const double first = std::abs(w1(0) - mu - delta * A * D.S.a[0] * D.S.a[0]);
  const double drift = std::abs(D.rep.omega(0) - D.rep.omega0(0));
  const bool ok = first <= 4 * std::pow(eps, 0.25) * delta && drift <= 8 * delta;
  return {ok, "first-order remainder " + fmt("%.2e", first) + " (bound " + fmt("%.2e", 4 * std::pow(eps, 0.25) * delta) +
                  "), |omega - omega0| " + fmt("%.2e", drift) + " (bound " + fmt("%.1e", 8 * delta) + ")"};
}

Outcome end_to_end() {
  const Desk& D = desk();
  const auto& r = D.rep;
  const double final_res = r.residual_history.back();

  const oracle::HybridResult h = oracle::hybrid_solve(D.es, D.S.beta[0], D.S.a[0], D.cfg.delta, 1, 1, r.omega_first(0));
  double diff = std::abs(h.omega - r.omega(0));
  for (Index t = 0; t < r.u.time_size(); ++t) {
    const int n = r.u.time_index().decode(t)(0);
    for (Index s = 0; s < r.u.space_size(); ++s) {
      const Complex ref = std::abs(n) <= 1 ? h.uhat(n + 1, s) : Complex(0.0, 0.0);
      diff = std::max(diff, std::abs(ref - r.u.values()(t, s)));
    }
  }
  const double bound = std::sqrt(0.02 + D.cfg.delta);
  const bool ok = r.converged && r.iterations <= 8 && final_res <= 1e-10 && r.quadratic_slope >= 1.5 && diff <= 1e-8 &&
                  r.time.times.size() == 50 && r.time.max_residual <= 1e-8 && r.decay.rho_star > 0 &&
                  r.decay.sum_at_rho_star <= bound;
  std::ostringstream s;
  s << r.iterations << " steps, residual " << fmt("%.2e", final_res) << ", order " << fmt("%.2f", r.quadratic_slope)
    << ", oracle diff " << fmt("%.2e", diff) << ", time residual " << fmt("%.2e", r.time.max_residual) << ", rho* "
    << fmt("%.3f", r.decay.rho_star) << " sum " << fmt("%.3f", r.decay.sum_at_rho_star) << " <= " << fmt("%.3f", bound);
  return {ok, s.str()};
}

Outcome second_solve() {
  const EigenSystem es = diagonalize_and_relabel(params(2, 0.02, 0.3), Region::box(2, 5));
  ResonantSet S;
  S.beta = {IntVec::Zero(2)};
  S.a = {1.3};
  SolverConfig cfg;
  cfg.delta = 1e-3;
  cfg.M = 2;
  cfg.tol = 1e-8;
  const SolutionReport r = cwb_solve(es, S, cfg);
  const bool ok = r.converged && r.residual_history.back() <= 1e-8 && r.decay.rho_star > 0;
  return {ok, std::to_string(r.iterations) + " steps, residual " + fmt("%.2e", r.residual_history.back()) + ", rho* " +
                  fmt("%.3f", r.decay.rho_star)};
}

Outcome neumann_lemma() {
  Rng rng(5, "neumann");
  std::vector<IntVec> pts;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int s = 0; s < 2; ++s) pts.push_back((IntVec(2) << a, b).finished());
  const Index n = static_cast<Index>(pts.size());
  const double c = 0.5, C = 2.0;
  const double gate = 0.5 / (4.0 * 81.0 * std::pow(5.0, C));  // ε₂/ε₁ at the smallness limit
  auto dist = [&](Index a, Index b) { return static_cast<double>(l1_norm(pts[static_cast<std::size_t>(a)] - pts[static_cast<std::size_t>(b)])); };
  auto make = [&](double eps1, double eps2, bool weak_A) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n), B(n, n);
    for (Index a = 0; a < n; ++a) {
      const double mag = weak_A ? 0.5 * eps1 : rng.uniform(2.0 * eps1, 2.0 * eps1 + 3.0);
      A(a, a) = std::polar(mag, rng.uniform(0.0, 6.283185307179586));
      for (Index b = 0; b < n; ++b) {
        if (a != b) A(a, b) = std::polar(0.01 * eps1 * std::exp(-3 * c * dist(a, b)), rng.uniform(0.0, 6.28));
        B(a, b) = std::polar(eps2 * std::pow(dist(a, b) + 1, C) * std::exp(-c * dist(a, b)) * rng.uniform(),
                             rng.uniform(0.0, 6.28));
      }
    }
    return std::make_pair(A, B);
  };
  int good = 0, gated = 0;
  double worst_norm = 0, worst_entry = 0;
  for (int k = 0; k < 50; ++k) {
    const double eps1 = rng.uniform(0.1, 1.0);
    const double eps2 = rng.uniform(0.05, 0.95) * gate * eps1;
    const auto [A, B] = make(eps1, eps2, false);
    try {
      const NeumannReport r = neumann_verify(A, B, pts, eps1, eps2, c, C);
      good += r.holds();
      worst_norm = std::max(worst_norm, r.norm / r.norm_bound);
      worst_entry = std::max(worst_entry, r.entry_excess);
    } catch (const HypothesisViolated&) {
    }
  }
  for (int k = 0; k < 10; ++k) {
    const double eps1 = rng.uniform(0.1, 1.0);
    const bool weak = k % 2 == 1;
    const double eps2 = (weak ? 0.5 : rng.uniform(2.0, 10.0)) * gate * eps1;
    const auto [A, B] = make(eps1, eps2, weak);
    try {
      neumann_verify(A, B, pts, eps1, eps2, c, C);
    } catch (const HypothesisViolated&) {
      ++gated;
    }
  }
  return {good == 50 && gated == 10, std::to_string(good) + "/50 conclusions verified (max norm ratio " +
                                         fmt("%.3f", worst_norm) + ", max entry ratio " + fmt("%.2e", worst_entry) +
                                         "), " + std::to_string(gated) + "/10 violations gated"};
}

Outcome ldt_monotonicity() {
  const Desk& D = desk();
  LdtOptions opt;
  opt.scales = {6, 10};
  opt.sigma_samples = 2000;
  opt.sigma_lo = -10;
  opt.sigma_hi = 10;
  opt.seed = 12;
  const LdtProbeReport r = ldt_probe(D.rep.u, D.es, D.rep.omega, D.cfg.delta, 1, opt);
  const auto& m = r.monotonicity.front();
  return {r.monotone(), "bad fraction N=6 " + fmt("%.4f", m.fraction_small) + ", N=10 " + fmt("%.4f", m.fraction_large) +
                            ", margin " + fmt("%.4f", m.margin)};
}

Outcome resolvent_identity() {
  const Desk& D = desk();
  Rng rng(6, "resolvent");
  int instances = 0, draws = 0;
  double worst = 0, worst_ratio = 0;
  bool bounds = true;
  while (instances < 10 && draws < 200) {
    ++draws;
    const double sigma = rng.uniform(-10.0, 10.0);
    const int j0 = static_cast<int>(rng.integer(-6, 6));
    const Region lambda = Region::box((IntVec(2) << 0, j0).finished(), 4);
    const RestrictedOperator op = restricted_operator(D.rep.u, D.es, D.rep.omega, sigma, D.cfg.delta, 1, lambda);
    const ResolventCheck r = resolvent_reconstruct_check(op, clamped_cover(lambda, 2));
    if (!r.cover_good) continue;  // premise of the norm bound not met
    ++instances;
    worst = std::max(worst, r.max_defect);
    worst_ratio = std::max(worst_ratio, r.norm / r.norm_bound);
    bounds = bounds && r.norm_holds;
  }
  return {instances == 10 && worst <= 1e-8 && bounds,
          std::to_string(instances) + " covered regions (" + std::to_string(draws) + " draws), max defect " +
              fmt("%.2e", worst) + ", max norm/bound " + fmt("%.3g", worst_ratio)};
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("maryland_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  const std::string bin = MARYLAND_RUN_PATH;
  const std::string cfg = std::string(MARYLAND_SOURCE_DIR) + "/configs/desk_d1.json";
  for (const char* run : {"a", "b"}) {
    const std::string out = (base / run).string();
    for (const char* verb : {"spectrum", "separation", "solve", "ldt"}) {
      const std::string cmd = bin + " " + verb + " --config " + cfg + " --out " + out + " > /dev/null 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, std::string(verb) + " exited nonzero"};
    }
    if (std::system((bin + " report " + out + " > /dev/null 2>&1").c_str()) != 0) return {false, "report exited nonzero"};
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    const fs::path other = base / "b" / e.path().filename();
    if (!fs::exists(other) || read_text(e.path().string()) != read_text(other.string()))
      return {false, e.path().filename().string() + " differs between runs"};
    ++files;
  }
  fs::remove_all(base);
  return {files >= 12, std::to_string(files) + " artifacts byte-identical across two runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"potential approximation", potential_approximation},
      {"symmetry exactness", symmetry_exactness},
      {"translation covariance", translation_covariance},
      {"eigenfunction localization", localization},
      {"linearization correctness", linearization_correctness},
      {"nonlinearity oracle", nonlinearity_oracle},
      {"Q-equation first order", q_equation},
      {"end-to-end solve", end_to_end},
      {"second solve d=2", second_solve},
      {"Neumann lemma", neumann_lemma},
      {"LDT monotonicity", ldt_monotonicity},
      {"resolvent identity", resolvent_identity},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %2zu %-28s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
