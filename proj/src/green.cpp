#include "maryland/green.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "maryland/errors.hpp"
#include "maryland/fit.hpp"
#include "maryland/nonlinear.hpp"
#include "maryland/parallel.hpp"
#include "maryland/rng.hpp"

namespace maryland {

namespace {

using Eigen::MatrixXcd;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest singular value from the Hermitian square; relative accuracy is enough for the top one.
double spectral_norm(const MatrixXcd& G) {
  if (G.size() == 0) return 0.0;
  const MatrixXcd H = G.adjoint() * G;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

struct UnionFind {
  std::vector<Index> parent;
  explicit UnionFind(Index n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  Index find(Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
      a = parent[static_cast<std::size_t>(a)];
    }
    return a;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
};

// Merge per-distance maxima into `into`.
void merge_bins(std::vector<double>& into, const std::vector<double>& from) {
  if (into.size() < from.size()) into.resize(from.size(), 0.0);
  for (std::size_t k = 0; k < from.size(); ++k) into[k] = std::max(into[k], from[k]);
}

struct RateFit {
  bool available = false;
  double rate = kNaN;
  int bins = 0;
};

RateFit fit_rate(const std::vector<double>& bins, int from) {
  std::vector<double> x, y;
  for (std::size_t k = static_cast<std::size_t>(std::max(from, 0)); k < bins.size(); ++k)
    if (bins[k] > 0.0 && std::isfinite(bins[k])) {
      x.push_back(static_cast<double>(k));
      y.push_back(std::log(bins[k]));
    }
  RateFit out;
  out.bins = static_cast<int>(x.size());
  if (out.bins < kMinRateBins) return out;
  out.available = true;
  out.rate = -linear_fit(x, y).slope;
  return out;
}

int fit_start(int N) { return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(N)) - 1e-12)); }

std::vector<double> bin_by_distance(const MatrixXcd& G, const ModeList& modes, const std::vector<Index>& idx) {
  std::vector<double> bins;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const auto dist = static_cast<std::size_t>(mode_distance(modes[idx[a]], modes[idx[b]]));
      if (bins.size() <= dist) bins.resize(dist + 1, 0.0);
      bins[dist] = std::max(bins[dist], std::abs(G(static_cast<Index>(a), static_cast<Index>(b))));
    }
  return bins;
}

double decay_excess_idx(const MatrixXcd& G, const ModeList& modes, const std::vector<Index>& idx, double c,
                        double from) {
  double worst = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const int dist = mode_distance(modes[idx[a]], modes[idx[b]]);
      if (dist < from) continue;
      worst = std::max(worst, std::abs(G(static_cast<Index>(a), static_cast<Index>(b))) * std::exp(c * dist));
    }
  return worst;
}

std::vector<Index> all_indices(Index n) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

std::vector<IntVec> distinct_points(const ModeList& modes) {
  std::vector<IntVec> pts;
  for (const auto& m : modes.modes()) pts.push_back(m.point());
  std::sort(pts.begin(), pts.end(), lex_less);
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

// One σ-independent block of T: coupling restricted to a connected component.
struct Component {
  std::vector<Index> idx;
  MatrixXcd coupling;
};

struct ProbeRegion {
  ModeList modes;
  std::vector<Component> components;
};

ProbeRegion prepare_region(const LinearizationFields* fields, const EigenSystem& es, double delta,
                           const Region& region, int b, long long cap) {
  ProbeRegion pr;
  pr.modes = enumerate_region(region, b, true, cap);
  for (const auto& m : pr.modes.modes())
    if (es.slot(m.j) < 0) throw std::invalid_argument("probe region leaves the eigensystem box");
  const Index n = pr.modes.size();
  UnionFind uf(n);
  MatrixXcd C;
  if (fields != nullptr && delta != 0.0) {
    C = delta * coupling_matrix(*fields, es, pr.modes);
    for (Index a = 0; a < n; ++a)
      for (Index c = 0; c < n; ++c)
        if (a != c && C(a, c) != Complex(0.0, 0.0)) uf.unite(a, c);
  }
  std::map<Index, std::vector<Index>> groups;
  for (Index a = 0; a < n; ++a) groups[uf.find(a)].push_back(a);
  for (auto& [root, idx] : groups) {
    Component comp;
    comp.idx = std::move(idx);
    if (C.size() != 0)
      comp.coupling = C(comp.idx, comp.idx);
    else
      comp.coupling = MatrixXcd::Zero(static_cast<Index>(comp.idx.size()), static_cast<Index>(comp.idx.size()));
    pr.components.push_back(std::move(comp));
  }
  return pr;
}

struct RegionEval {
  double inv_norm = 0;
  double hs2 = 0;
  double excess = 0;
  std::vector<double> bins;
};

RegionEval evaluate_region(const ProbeRegion& pr, const EigenSystem& es, const Eigen::VectorXd& omega, double sigma,
                           double rate, double from) {
  RegionEval ev;
  const Eigen::VectorXcd D = shifted_diagonal(pr.modes, es, omega, sigma);
  for (const auto& comp : pr.components) {
    const auto k = static_cast<Index>(comp.idx.size());
    if (k == 1) {
      const double g = 1.0 / std::abs(D(comp.idx[0]));
      ev.inv_norm = std::max(ev.inv_norm, g);
      ev.hs2 += g * g;
      if (ev.bins.empty()) ev.bins.assign(1, 0.0);
      ev.bins[0] = std::max(ev.bins[0], g);
      if (from <= 0) ev.excess = std::max(ev.excess, g);
      continue;
    }
    MatrixXcd T = comp.coupling;
    T.diagonal() += D(comp.idx);
    Eigen::PartialPivLU<MatrixXcd> lu(T);
    const MatrixXcd G = lu.inverse();
    if (!G.allFinite()) {
      ev.inv_norm = kInf;
      ev.hs2 = kInf;
      ev.excess = kInf;
      continue;
    }
    ev.inv_norm = std::max(ev.inv_norm, spectral_norm(G));
    ev.hs2 += G.squaredNorm();
    ev.excess = std::max(ev.excess, decay_excess_idx(G, pr.modes, comp.idx, rate, from));
    merge_bins(ev.bins, bin_by_distance(G, pr.modes, comp.idx));
  }
  return ev;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

int mode_distance(const ModeIndex& a, const ModeIndex& b) {
  return linf_norm(a.n - b.n) + linf_norm(a.j - b.j);
}

RestrictedOperator restrict_to(const RestrictedOperator& op, const Region& region) {
  std::vector<Index> idx;
  std::vector<ModeIndex> kept;
  for (Index a = 0; a < op.modes.size(); ++a)
    if (region.contains(op.modes[a].point())) {
      idx.push_back(a);
      kept.push_back(op.modes[a]);
    }
  RestrictedOperator out;
  out.T = op.T(idx, idx);
  out.modes = ModeList(std::move(kept), op.modes.b(), op.modes.d());
  return out;
}

RestrictedOperator restricted_operator(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega,
                                       double sigma, double delta, int p, const Region& region) {
  RestrictedOperator op;
  op.modes = enumerate_region(region, u.b(), true);
  op.T = linearized_operator(u, es, omega, sigma, delta, p, op.modes);
  return op;
}

GreenReport green_norm_and_decay(const RestrictedOperator& op, int N) {
  const Index n = op.T.rows();
  if (n == 0 || op.T.cols() != n || op.modes.size() != n)
    throw SingularRestriction("restriction is empty or does not match its mode list");
  Eigen::JacobiSVD<MatrixXcd> svd(op.T);
  const auto& sv = svd.singularValues();
  GreenReport r;
  r.sigma_min = sv(n - 1);
  if (!(r.sigma_min > sv(0) * 1e-15)) throw SingularRestriction("restricted operator is numerically singular");
  r.G = op.T.partialPivLu().inverse();
  r.inv_norm = Eigen::JacobiSVD<MatrixXcd>(r.G).singularValues()(0);
  r.hs_norm = r.G.norm();
  r.max_by_distance = bin_by_distance(r.G, op.modes, all_indices(n));
  r.fit_from = fit_start(N);
  const RateFit f = fit_rate(r.max_by_distance, r.fit_from);
  r.rate_available = f.available;
  r.rate = f.available ? f.rate : kNaN;
  r.bins = f.bins;
  return r;
}

double decay_excess(const Eigen::MatrixXcd& G, const ModeList& modes, double c, double from) {
  return decay_excess_idx(G, modes, all_indices(modes.size()), c, from);
}

bool LdtProbeReport::monotone() const {
  return std::all_of(monotonicity.begin(), monotonicity.end(), [](const auto& m) { return m.holds; });
}

MonotonicityCheck compare_fractions(int N_small, double f_small, int n_small, int N_large, double f_large,
                                    int n_large) {
  MonotonicityCheck m;
  m.N_small = N_small;
  m.N_large = N_large;
  m.fraction_small = f_small;
  m.fraction_large = f_large;
  const double var = f_small * (1 - f_small) / std::max(n_small, 1) + f_large * (1 - f_large) / std::max(n_large, 1);
  m.margin = 1.96 * std::sqrt(var);
  m.holds = f_large <= f_small + m.margin;
  return m;
}

LdtProbeReport ldt_probe(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega, double delta, int p,
                         const LdtOptions& opt) {
  if (opt.sigma_samples < 1) throw std::invalid_argument("need at least one sigma sample");
  if (!(opt.sigma_hi > opt.sigma_lo)) throw std::invalid_argument("empty sigma interval");
  const int b = u.b();
  const int d = es.d();
  std::vector<IntVec> centers = opt.j0;
  if (centers.empty()) centers.push_back(IntVec::Zero(d));

  std::optional<LinearizationFields> fields;
  if (delta != 0.0) {
    fields = linearization_fields(u, u.conjugate_sector(), es, p);
    if (conjugation_defect(*fields) > 1e-10)
      throw std::logic_error("linearization blocks violate the conjugation relation");
  }

  LdtProbeReport report;
  for (int N : opt.scales) {
    LdtScaleReport sr;
    sr.N = N;
    sr.j0 = centers;
    sr.samples = opt.sigma_samples;
    sr.seed = derive_seed(opt.seed, "ldt-sigma-" + std::to_string(N));
    sr.sigma_lo = opt.sigma_lo;
    sr.sigma_hi = opt.sigma_hi;
    sr.rate = opt.rate;
    sr.norm_kind = opt.hilbert_schmidt ? "hilbert-schmidt" : "operator";
    sr.closed_form = delta == 0.0;
    sr.norm_threshold = std::exp(std::pow(static_cast<double>(N), 0.9));
    sr.measure_bound = std::exp(-std::pow(static_cast<double>(N), 1.0 / 30.0));

    std::vector<ProbeRegion> regions;
    for (const auto& j0 : centers) {
      if (j0.size() != d) throw std::invalid_argument("j0 has wrong dimension");
      IntVec c(b + d);
      c << IntVec::Zero(b), j0;
      regions.push_back(prepare_region(fields ? &*fields : nullptr, es, delta, Region::box(c, N), b, opt.mode_cap));
      sr.region_modes += regions.back().modes.size();
      sr.components += static_cast<int>(regions.back().components.size());
    }

    Rng rng(sr.seed);
    const double width = (opt.sigma_hi - opt.sigma_lo) / opt.sigma_samples;
    sr.per_sample.resize(static_cast<std::size_t>(opt.sigma_samples));
    for (int i = 0; i < opt.sigma_samples; ++i)
      sr.per_sample[static_cast<std::size_t>(i)].sigma = opt.sigma_lo + (i + rng.uniform()) * width;

    const double from = std::sqrt(static_cast<double>(N));
    const int first_bin = fit_start(N);
    parallel_for(sr.per_sample.size(), opt.threads, [&](std::size_t i) {
      LdtSample& s = sr.per_sample[i];
      double norm = 0.0, excess = 0.0;
      std::vector<double> bins;
      for (const auto& pr : regions) {
        const RegionEval ev = evaluate_region(pr, es, omega, s.sigma, opt.rate, from);
        norm = std::max(norm, opt.hilbert_schmidt ? std::sqrt(ev.hs2) : ev.inv_norm);
        excess = std::max(excess, ev.excess);
        merge_bins(bins, ev.bins);
      }
      s.inv_norm = norm;
      s.decay_excess = excess;
      s.norm_ok = norm <= sr.norm_threshold;
      s.decay_ok = excess <= 1.0;
      s.rate = fit_rate(bins, first_bin).rate;
    });

    int norm_failed = 0, decay_failed = 0, failed = 0;
    std::vector<double> rates;
    for (const auto& s : sr.per_sample) {
      norm_failed += !s.norm_ok;
      decay_failed += !s.decay_ok;
      if (!s.norm_ok || !s.decay_ok) {
        ++failed;
        sr.failing_sigma.push_back(s.sigma);
      }
      if (std::isfinite(s.rate))
        rates.push_back(s.rate);
      else
        ++sr.rate_insufficient;
    }
    const double n = opt.sigma_samples;
    sr.fraction_norm_failed = norm_failed / n;
    sr.fraction_decay_failed = decay_failed / n;
    sr.fraction_failed = failed / n;
    if (!rates.empty()) {
      sr.rate_min = *std::min_element(rates.begin(), rates.end());
      sr.rate_max = *std::max_element(rates.begin(), rates.end());
      sr.rate_median = median(rates);
    } else {
      sr.rate_min = sr.rate_median = sr.rate_max = kNaN;
    }
    report.scales.push_back(std::move(sr));
  }

  for (std::size_t a = 0; a < report.scales.size(); ++a)
    for (std::size_t c = a + 1; c < report.scales.size(); ++c) {
      const auto* s = &report.scales[a];
      const auto* l = &report.scales[c];
      if (s->N > l->N) std::swap(s, l);
      report.monotonicity.push_back(
          compare_fractions(s->N, s->fraction_failed, s->samples, l->N, l->fraction_failed, l->samples));
    }
  return report;
}

NeumannReport neumann_verify(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const std::vector<IntVec>& points,
                             double eps1, double eps2, double c, double C) {
  const Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n || static_cast<Index>(points.size()) != n)
    throw std::invalid_argument("A, B and the point list must agree in size");

  std::vector<std::string> failed;
  if (!(eps1 > 0) || !(eps2 >= 0) || !(c > 0) || !(C > 1)) failed.push_back("parameters");

  auto dist = [&](Index a, Index b) { return static_cast<double>(l1_norm(points[static_cast<std::size_t>(a)] - points[static_cast<std::size_t>(b)])); };
  constexpr double slack = 1.0 + 1e-12;

  std::vector<IntVec> distinct = points;
  std::sort(distinct.begin(), distinct.end(), lex_less);
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  int diam = 0;
  for (const auto& x : distinct)
    for (const auto& y : distinct) diam = std::max(diam, l1_norm(x - y));

  NeumannReport r;
  const double volume = static_cast<double>(distinct.size());
  r.smallness = 4.0 * volume * volume * std::pow(diam + 1.0, C) * eps2 / eps1;

  MatrixXcd Ainv;
  if (n > 0) {
    Eigen::JacobiSVD<MatrixXcd> svd(A);
    if (!(svd.singularValues()(n - 1) > svd.singularValues()(0) * 1e-15)) {
      failed.push_back("A_invertible");
    } else {
      Ainv = A.partialPivLu().inverse();
      if (1.0 / svd.singularValues()(n - 1) > slack / eps1) failed.push_back("inverse_norm");
      bool decay = true;
      for (Index a = 0; a < n && decay; ++a)
        for (Index b = 0; b < n; ++b)
          if (std::abs(Ainv(a, b)) > slack * std::exp(-c * dist(a, b)) / eps1) {
            decay = false;
            break;
          }
      if (!decay) failed.push_back("inverse_decay");
    }
  }
  bool bdecay = true;
  for (Index a = 0; a < n && bdecay; ++a)
    for (Index b = 0; b < n; ++b)
      if (std::abs(B(a, b)) > slack * eps2 * std::pow(dist(a, b) + 1.0, C) * std::exp(-c * dist(a, b))) {
        bdecay = false;
        break;
      }
  if (!bdecay) failed.push_back("perturbation_decay");
  if (!(r.smallness <= 0.5)) failed.push_back("smallness");
  if (!failed.empty()) throw HypothesisViolated(failed);

  r.norm_bound = 2.0 / eps1;
  if (n == 0) {
    r.norm_holds = r.entry_holds = true;
    return r;
  }
  const MatrixXcd S = A + B;
  Eigen::JacobiSVD<MatrixXcd> svd(S);
  const double smin = svd.singularValues()(n - 1);
  if (!(smin > 0)) {
    r.norm = kInf;
    r.entry_excess = kInf;
    return r;
  }
  const MatrixXcd G = S.partialPivLu().inverse();
  r.norm = 1.0 / smin;
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b)
      r.entry_excess = std::max(r.entry_excess, std::abs(G(a, b) - Ainv(a, b)) * eps1 * std::exp(c * dist(a, b)));
  r.norm_holds = r.norm <= slack * r.norm_bound;
  r.entry_holds = r.entry_excess <= slack;
  return r;
}

BoxClassification classify_boxes(const RestrictedOperator& op, int N0, int N, const BoxThresholds& thr) {
  if (N0 < 0 || op.modes.size() == 0) throw std::invalid_argument("classify_boxes needs N0 >= 0 and a nonempty region");
  BoxClassification out;
  out.N0 = N0;
  out.N = N;
  const double norm_bound = thr.norm_bound > 0 ? thr.norm_bound : std::exp(std::pow(static_cast<double>(N0), 0.9));
  const double from = thr.decay_from > 0 ? thr.decay_from : std::sqrt(static_cast<double>(N0));

  const std::vector<IntVec> pts = distinct_points(op.modes);
  const Index dim = pts.front().size();
  IntVec lo = pts.front(), hi = pts.front();
  for (const auto& x : pts) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  const long long full = static_cast<long long>(std::pow(2 * N0 + 1, static_cast<double>(dim))) *
                         (op.modes.sector_range(Sector::minus).second > op.modes.sector_range(Sector::minus).first ? 2 : 1);
  for (const auto& c : pts) {
    if (((c - lo).array() < N0).any() || ((hi - c).array() < N0).any()) continue;
    const RestrictedOperator sub = restrict_to(op, Region::box(c, N0));
    if (sub.modes.size() != full) continue;
    BoxEntry e;
    e.center = c;
    try {
      const GreenReport g = green_norm_and_decay(sub, N0);
      e.inv_norm = g.inv_norm;
      e.decay_excess = decay_excess(g.G, sub.modes, thr.rate, from);
      e.good = e.inv_norm <= norm_bound && e.decay_excess <= 1.0;
    } catch (const SingularRestriction&) {
      e.inv_norm = kInf;
      e.decay_excess = kInf;
      e.good = false;
    }
    (e.good ? out.good : out.bad) += 1;
    out.boxes.push_back(std::move(e));
  }

  std::vector<IntVec> chosen;
  for (const auto& e : out.boxes) {
    if (e.good) continue;
    const bool disjoint = std::all_of(chosen.begin(), chosen.end(),
                                      [&](const IntVec& q) { return linf_norm(q - e.center) > 2 * N0; });
    if (disjoint) chosen.push_back(e.center);
  }
  out.disjoint_bad = static_cast<int>(chosen.size());
  out.sublinear_bound = std::pow(static_cast<double>(N), 3.0 / 8.0) / std::pow(static_cast<double>(N), 0.25);
  out.sublinear_holds = out.disjoint_bad <= out.sublinear_bound;
  return out;
}

std::vector<Region> clamped_cover(const Region& lambda, int M) {
  if (lambda.kind != RegionKind::full_box) throw std::invalid_argument("clamped_cover expects a box");
  if (M > lambda.size) throw std::invalid_argument("cover boxes larger than the region");
  const IntVec lo = lambda.lower(), hi = lambda.upper();
  std::vector<IntVec> centers;
  for (const auto& x : enumerate_points(lambda)) {
    IntVec c = x;
    for (Index k = 0; k < c.size(); ++k) c(k) = std::clamp(c(k), lo(k) + M, hi(k) - M);
    centers.push_back(c);
  }
  std::sort(centers.begin(), centers.end(), lex_less);
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  std::vector<Region> cover;
  for (auto& c : centers) cover.push_back(Region::box(std::move(c), M));
  return cover;
}

ResolventCheck resolvent_reconstruct_check(const RestrictedOperator& op, const std::vector<Region>& cover,
                                           double rate) {
  const Index n = op.modes.size();
  if (n == 0 || cover.empty()) throw std::invalid_argument("resolvent check needs a region and a cover");
  const std::vector<IntVec> pts = distinct_points(op.modes);

  for (const auto& q : pts) {
    bool covered = false;
    for (const auto& W : cover) {
      if (!W.contains(q)) continue;
      double dist = kInf;
      for (const auto& y : pts)
        if (!W.contains(y)) dist = std::min(dist, static_cast<double>(linf_norm(y - q)));
      if (dist >= 0.5 * W.size) {
        covered = true;
        break;
      }
    }
    if (!covered) throw CoverageGap(q);
  }

  Eigen::JacobiSVD<MatrixXcd> svd(op.T);
  if (!(svd.singularValues()(n - 1) > svd.singularValues()(0) * 1e-15))
    throw SingularRestriction("region operator is numerically singular");
  const MatrixXcd GL = op.T.partialPivLu().inverse();

  ResolventCheck out;
  out.norm = 1.0 / svd.singularValues()(n - 1);
  for (const auto& W : cover) {
    std::vector<Index> in, rest;
    for (Index a = 0; a < n; ++a) (W.contains(op.modes[a].point()) ? in : rest).push_back(a);
    if (in.empty()) continue;
    out.M1 = std::max(out.M1, W.size);
    RestrictedOperator sub{op.T(in, in), ModeList(std::vector<ModeIndex>(), op.modes.b(), op.modes.d())};
    std::vector<ModeIndex> sub_modes;
    for (Index a : in) sub_modes.push_back(op.modes[a]);
    sub.modes = ModeList(std::move(sub_modes), op.modes.b(), op.modes.d());
    const GreenReport gw = green_norm_and_decay(sub, W.size);
    const bool good = gw.inv_norm <= std::exp(std::pow(static_cast<double>(W.size), 0.9)) &&
                      decay_excess(gw.G, sub.modes, rate, std::sqrt(static_cast<double>(W.size))) <= 1.0;
    out.cover_good = out.cover_good && good;

    MatrixXcd rhs = MatrixXcd::Zero(static_cast<Index>(in.size()), n);
    rhs(Eigen::all, in) = gw.G;
    if (!rest.empty()) {
      const MatrixXcd Gamma = -op.T(in, rest);
      rhs += gw.G * Gamma * GL(rest, Eigen::all);
    }
    out.max_defect = std::max(out.max_defect, (GL(in, Eigen::all) - rhs).cwiseAbs().maxCoeff());
    out.pairs += static_cast<int>(in.size() * static_cast<std::size_t>(n));
  }
  const double dim = static_cast<double>(pts.front().size());
  out.norm_bound = 4.0 * std::pow(2.0 * out.M1 + 1.0, dim) * std::exp(std::pow(static_cast<double>(out.M1), 0.9));
  out.norm_holds = out.norm <= out.norm_bound;
  return out;
}

}  // namespace maryland
