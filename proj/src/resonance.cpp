#include "maryland/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

#include "maryland/errors.hpp"
#include "maryland/parallel.hpp"
#include "maryland/rng.hpp"

namespace maryland {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long double kPiL = 3.141592653589793238462643383279502884L;

void finish(PredicateEntry& e, bool strict = false) {
  e.margin = e.value - e.threshold;
  e.holds = strict ? e.value > e.threshold : e.value >= e.threshold;
}

double dot(const Eigen::VectorXd& omega, const IntVec& n) {
  double acc = 0.0;
  for (Index k = 0; k < n.size(); ++k) acc += n(k) * omega(k);
  return acc;
}

long double reduce_unit(long double x) {
  long double r = x - std::floor(x);
  if (r >= 1.0L) r -= 1.0L;
  return r;
}

long double shifted_phase(const Eigen::VectorXd& alpha, double theta, const IntVec& site, long double extra) {
  long double acc = static_cast<long double>(theta) + extra;
  for (Index k = 0; k < site.size(); ++k) acc += static_cast<long double>(site(k)) * static_cast<long double>(alpha(k));
  return reduce_unit(acc);
}

double poly_eval(const Eigen::VectorXd& c, double t) {
  double acc = 0.0;
  for (Index i = c.size() - 1; i >= 0; --i) acc = acc * t + c(i);
  return acc;
}

std::vector<IntVec> cube(int dim, int R) { return enumerate_points(Region::box(dim, R)); }

}  // namespace

bool SeparationReport::all_hold() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const PredicateEntry& e) { return e.id == "second-melnikov" ? e.holds_excluding_trivial : e.holds; });
}

Eigen::VectorXd omega_zero(const EigenSystem& es, const std::vector<IntVec>& beta) {
  Eigen::VectorXd w(static_cast<Index>(beta.size()));
  for (std::size_t k = 0; k < beta.size(); ++k) {
    const Index s = es.slot(beta[k]);
    if (s < 0) throw std::invalid_argument("anchor site outside the eigensystem box");
    w(static_cast<Index>(k)) = es.mu(s);
  }
  return w;
}

std::vector<Index> sites_within(const EigenSystem& es, int N) {
  std::vector<Index> out;
  for (const IntVec& j : cube(es.d(), N)) {
    const Index s = es.slot(j);
    if (s < 0) throw std::invalid_argument("scan range exceeds the eigensystem box");
    out.push_back(s);
  }
  return out;
}

PredicateEntry check_pair_separation(const EigenSystem& es, int N) {
  PredicateEntry e;
  e.id = "pair-separation";
  e.range = N;
  const auto& p = es.params;
  e.threshold = M_PI * p.gamma / (std::pow(2.0 * p.d, p.tau) * std::pow(static_cast<double>(N), p.tau));
  const auto slots = sites_within(es, N);
  e.value = kInf;
  for (std::size_t a = 0; a < slots.size(); ++a)
    for (std::size_t b = a + 1; b < slots.size(); ++b) {
      ++e.scanned;
      const double gap = std::abs(es.mu(slots[a]) - es.mu(slots[b]));
      if (gap < e.value) {
        e.value = gap;
        e.witness = {{"j", es.sites[static_cast<std::size_t>(slots[a])]},
                     {"j'", es.sites[static_cast<std::size_t>(slots[b])]}};
      }
    }
  finish(e);
  return e;
}

PredicateEntry check_magnitude_bounds(const EigenSystem& es, int N) {
  PredicateEntry e;
  e.id = "magnitude";
  e.range = N;
  const double scale = std::pow(static_cast<double>(N), es.d() + 2);
  e.threshold = 1.0 / (2.0 * scale);
  e.upper_threshold = 2.0 * scale;
  e.value = kInf;
  e.max_value = 0.0;
  IntVec arg_min, arg_max;
  for (Index s : sites_within(es, N)) {
    ++e.scanned;
    const double m = std::abs(es.mu(s));
    if (m < e.value) {
      e.value = m;
      arg_min = es.sites[static_cast<std::size_t>(s)];
    }
    if (m > e.max_value) {
      e.max_value = m;
      arg_max = es.sites[static_cast<std::size_t>(s)];
    }
  }
  e.margin = e.value - e.threshold;
  e.lower_holds = e.value >= e.threshold;
  e.upper_holds = e.max_value <= e.upper_threshold;
  e.holds = e.lower_holds && e.upper_holds;
  e.witness.push_back({"j_min", arg_min});
  if (!e.upper_holds) e.witness.push_back({"j_max", arg_max});
  return e;
}

PredicateEntry check_first_melnikov(const EigenSystem& es, const Eigen::VectorXd& omega0,
                                    const std::vector<IntVec>& beta, int R, double threshold, int sign) {
  PredicateEntry e;
  e.id = sign > 0 ? "first-melnikov-plus" : "first-melnikov-minus";
  e.range = R;
  e.threshold = threshold;
  e.value = kInf;
  const int b = static_cast<int>(omega0.size());
  const auto ns = cube(b, R);
  const auto slots = sites_within(es, R);
  for (const IntVec& n : ns) {
    const double nw = sign * dot(omega0, n);
    for (Index s : slots) {
      const IntVec& j = es.sites[static_cast<std::size_t>(s)];
      bool exempt = false;
      for (int k = 0; k < b && !exempt; ++k)
        exempt = j == beta[static_cast<std::size_t>(k)] && n == -sign * unit_vector(b, k);
      if (exempt) continue;
      ++e.scanned;
      const double v = std::abs(nw + es.mu(s));
      if (v < e.value) {
        e.value = v;
        e.witness = {{"n", n}, {"j", j}};
      }
    }
  }
  finish(e);
  return e;
}

PredicateEntry check_second_melnikov(const EigenSystem& es, const Eigen::VectorXd& omega0,
                                     const std::vector<IntVec>& beta, int R, double threshold) {
  PredicateEntry e;
  e.id = "second-melnikov";
  e.range = R;
  e.threshold = threshold;
  const int b = static_cast<int>(omega0.size());
  const auto ns = cube(b, R);
  const auto slots = sites_within(es, R);
  double best = kInf;
  std::vector<std::pair<std::string, IntVec>> best_witness, trivial_witness;
  for (const IntVec& n : ns) {
    const double nw = dot(omega0, n);
    for (Index s : slots) {
      const IntVec& j = es.sites[static_cast<std::size_t>(s)];
      for (Index t : slots) {
        const IntVec& jp = es.sites[static_cast<std::size_t>(t)];
        bool exempt = n.isZero() && j.isZero() && jp.isZero();
        for (int k = 0; k < b && !exempt; ++k)
          for (int kp = 0; kp < b && !exempt; ++kp)
            exempt = j == beta[static_cast<std::size_t>(k)] && jp == beta[static_cast<std::size_t>(kp)] &&
                     n == -unit_vector(b, k) + unit_vector(b, kp);
        if (exempt) continue;
        ++e.scanned;
        if (n.isZero() && s == t) {
          if (e.trivial_degenerate++ == 0) trivial_witness = {{"n", n}, {"j", j}, {"j'", jp}};
          continue;
        }
        const double v = std::abs(nw + es.mu(s) - es.mu(t));
        if (v < best) {
          best = v;
          best_witness = {{"n", n}, {"j", j}, {"j'", jp}};
        }
      }
    }
  }
  e.value_excluding_trivial = best;
  e.holds_excluding_trivial = best > threshold;
  if (e.trivial_degenerate > 0 && e.holds_excluding_trivial) {
    e.value = 0.0;
    e.witness = trivial_witness;
  } else {
    e.value = best;
    e.witness = best_witness;
  }
  finish(e, true);
  return e;
}

std::vector<PredicateEntry> check_omega_hypotheses(const EigenSystem& es, const Eigen::VectorXd& omega, int N,
                                                   int scale_floor, double K2) {
  if (scale_floor < 1 || N < scale_floor) throw std::invalid_argument("omega ladder needs 1 <= scale_floor <= N");
  std::vector<int> ladder;
  for (int s = scale_floor; s < N; s *= 2) ladder.push_back(s);
  ladder.push_back(N);
  const int b = static_cast<int>(omega.size());
  std::vector<PredicateEntry> out;
  for (int Nt : ladder) {
    const double thr = std::exp(-std::pow(static_cast<double>(Nt), 1.0 / K2));
    const auto ns = cube(b, 2 * Nt);
    const int jr = std::min(3 * Nt, es.radius() - linf_norm(es.box.center));

    PredicateEntry dio;
    dio.id = "dio-omega";
    dio.scale = Nt;
    dio.range = 2 * Nt;
    dio.threshold = thr;
    dio.value = kInf;
    for (const IntVec& n : ns) {
      if (n.isZero()) continue;
      ++dio.scanned;
      const double v = std::abs(dot(omega, n));
      if (v < dio.value) {
        dio.value = v;
        dio.witness = {{"n", n}};
      }
    }
    finish(dio);
    out.push_back(dio);

    PredicateEntry wsm;
    wsm.id = "melnikov-omega";
    wsm.scale = Nt;
    wsm.range = jr;
    wsm.threshold = thr;
    wsm.value = kInf;
    const auto slots = sites_within(es, jr);
    for (const IntVec& n : ns) {
      const double nw = dot(omega, n);
      for (Index s : slots)
        for (Index t : slots) {
          if (n.isZero() && s == t) continue;
          ++wsm.scanned;
          const double v = std::abs(nw - es.mu(s) + es.mu(t));
          if (v < wsm.value) {
            wsm.value = v;
            wsm.witness = {{"n", n}, {"j", es.sites[static_cast<std::size_t>(s)]},
                           {"j'", es.sites[static_cast<std::size_t>(t)]}};
          }
        }
    }
    finish(wsm);
    out.push_back(wsm);
  }
  return out;
}

SeparationReport separation_report(const EigenSystem& es, const std::vector<IntVec>& beta, int N, int R,
                                   double delta) {
  SeparationReport rep;
  const Eigen::VectorXd w0 = omega_zero(es, beta);
  const double thr = melnikov_threshold(delta);
  rep.entries.push_back(check_pair_separation(es, N));
  rep.entries.push_back(check_magnitude_bounds(es, N));
  rep.entries.push_back(check_first_melnikov(es, w0, beta, R, thr, +1));
  rep.entries.push_back(check_first_melnikov(es, w0, beta, R, thr, -1));
  rep.entries.push_back(check_second_melnikov(es, w0, beta, R, thr));
  return rep;
}

std::vector<Eigen::VectorXd> tan_derivative_polys(int order) {
  std::vector<Eigen::VectorXd> P;
  if (order < 1) return P;
  P.push_back(Eigen::VectorXd::Ones(1));
  for (int p = 1; p < order; ++p) {
    const Eigen::VectorXd& c = P.back();
    // P_{p+1} = 2t·P_p + (1 + t²)·P_p'
    Eigen::VectorXd next = Eigen::VectorXd::Zero(c.size() + 1);
    for (Index i = 0; i < c.size(); ++i) next(i + 1) += 2.0 * c(i);
    for (Index i = 1; i < c.size(); ++i) {
      next(i - 1) += i * c(i);
      next(i + 1) += i * c(i);
    }
    P.push_back(next);
  }
  return P;
}

Eigen::VectorXd tan_pi_derivatives(double theta, int order) {
  const long double x = kPiL * reduce_unit(static_cast<long double>(theta));
  const double t = static_cast<double>(std::sin(x) / std::cos(x));
  Eigen::VectorXd out(order + 1);
  out(0) = t;
  const auto P = tan_derivative_polys(order);
  double pi_pow = 1.0;
  for (int p = 1; p <= order; ++p) {
    pi_pow *= M_PI;
    out(p) = pi_pow * (1.0 + t * t) * poly_eval(P[static_cast<std::size_t>(p - 1)], t);
  }
  return out;
}

Eigen::MatrixXd transversality_matrix(const Eigen::VectorXd& alpha, double theta, const std::vector<IntVec>& sites) {
  const int s = static_cast<int>(sites.size());
  Eigen::MatrixXd W(s, s);
  for (int q = 0; q < s; ++q) {
    const long double x = shifted_phase(alpha, theta, sites[static_cast<std::size_t>(q)], 0.5L);
    W.col(q) = tan_pi_derivatives(static_cast<double>(x), s).tail(s);
  }
  return W;
}

double transversality_det_product(const Eigen::VectorXd& alpha, double theta, const std::vector<IntVec>& sites) {
  const int s = static_cast<int>(sites.size());
  std::vector<double> t(static_cast<std::size_t>(s));
  for (int q = 0; q < s; ++q) {
    const long double x = kPiL * shifted_phase(alpha, theta, sites[static_cast<std::size_t>(q)], 0.0L);
    t[static_cast<std::size_t>(q)] = -static_cast<double>(std::cos(x) / std::sin(x));
  }
  double det = std::pow(M_PI, s * (s + 1) / 2.0);
  double fact = 1.0;
  for (int p = 1; p <= s; ++p) {
    fact *= p;
    det *= fact;
  }
  for (int q = 0; q < s; ++q) det *= 1.0 + t[static_cast<std::size_t>(q)] * t[static_cast<std::size_t>(q)];
  for (int p = 0; p < s; ++p)
    for (int q = p + 1; q < s; ++q) det *= t[static_cast<std::size_t>(q)] - t[static_cast<std::size_t>(p)];
  return det;
}

TransversalityReport transversality_scan(const Eigen::VectorXd& alpha, const std::vector<double>& theta_grid,
                                         const Eigen::VectorXi& k, const std::vector<IntVec>& sites,
                                         double pole_tol) {
  const int s = static_cast<int>(sites.size());
  if (k.size() != s) throw std::invalid_argument("k and sites differ in length");
  if (s < 1 || s > 6) throw std::invalid_argument("transversality scan supports 1 <= s <= 6");
  TransversalityReport rep;
  rep.min_abs_F = kInf;
  rep.min_derivative_stack = kInf;
  const Eigen::VectorXd kd = k.cast<double>();
  for (double th : theta_grid) {
    TransversalitySample smp;
    smp.theta = th;
    for (int l = 0; l < s; ++l) {
      const long double ph = shifted_phase(alpha, th, sites[static_cast<std::size_t>(l)], 0.0L);
      if (torus_norm(ph) < pole_tol) throw PoleOnGrid(th, l);
      smp.F += k(l) * static_cast<double>(std::cos(kPiL * ph) / std::sin(kPiL * ph));
    }
    const Eigen::MatrixXd W = transversality_matrix(alpha, th, sites);
    smp.D = -W * kd;
    smp.det_direct = W.partialPivLu().determinant();
    smp.det_product = transversality_det_product(alpha, th, sites);
    const double scale = std::max(std::abs(smp.det_direct), std::abs(smp.det_product));
    if (scale > 0.0)
      rep.max_det_disagreement = std::max(rep.max_det_disagreement, std::abs(smp.det_direct - smp.det_product) / scale);
    rep.min_abs_F = std::min(rep.min_abs_F, std::abs(smp.F));
    rep.min_derivative_stack = std::min(rep.min_derivative_stack, smp.D.cwiseAbs().maxCoeff());
    rep.samples.push_back(std::move(smp));
  }
  return rep;
}

MonteCarloRow theta_monte_carlo(const MarylandParams& base, const std::vector<IntVec>& beta, double delta,
                                const ThetaSweepOptions& opts, std::uint64_t seed) {
  MonteCarloRow row;
  row.delta = delta;
  row.epsilon = base.eps;
  row.n_samples = opts.samples;
  row.seed = seed;
  std::vector<char> failed(static_cast<std::size_t>(opts.samples), 0);
  const Region box = Region::box(base.d, opts.box_radius);
  parallel_for(failed.size(), opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    MarylandParams p = base;
    p.theta = rng.uniform();
    try {
      const EigenSystem es = diagonalize_and_relabel(p, box);
      failed[i] = !separation_report(es, beta, opts.N, opts.R, delta).all_hold();
    } catch (const SingularPhase&) {
      failed[i] = 1;
    }
  });
  row.fraction_failed =
      static_cast<double>(std::count(failed.begin(), failed.end(), 1)) / std::max(1, opts.samples);
  return row;
}

}  // namespace maryland
