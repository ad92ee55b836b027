#include "maryland/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "maryland/errors.hpp"
#include "maryland/fit.hpp"
#include "maryland/matching.hpp"

namespace maryland {

namespace {

constexpr long double kPiL = 3.141592653589793238462643383279502884L;

long double reduce_unit(long double x) {
  long double r = x - std::floor(x);
  if (r >= 1.0L) r -= 1.0L;
  return r;
}

long double dot_alpha(const Eigen::VectorXd& alpha, const IntVec& site) {
  long double acc = 0.0L;
  for (Index k = 0; k < site.size(); ++k) acc += static_cast<long double>(site(k)) * static_cast<long double>(alpha(k));
  return acc;
}

// Assembly with the phase offset carried in extended precision.
Eigen::MatrixXd assemble(const Eigen::VectorXd& alpha, double eps, long double theta, double tol, const Region& box) {
  if (box.kind != RegionKind::full_box) throw std::invalid_argument("Hamiltonian needs a full box");
  const int dim = box.dim();
  const BoxIndexer idx(dim, box.size, box.center);
  const auto sites = enumerate_points(box);
  const Index n = static_cast<Index>(sites.size());
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    const IntVec& j = sites[static_cast<std::size_t>(s)];
    const long double phase = reduce_unit(theta + dot_alpha(alpha, j));
    const long double dist = torus_norm(phase);
    if (dist < static_cast<long double>(tol)) throw SingularPhase(j, static_cast<double>(dist));
    H(s, s) = maryland_potential(phase);
    for (int k = 0; k < dim; ++k) {
      IntVec nb = j;
      nb(k) += 1;
      if (!idx.contains(nb)) continue;
      const Index t = idx.encode(nb);
      H(s, t) = eps;
      H(t, s) = eps;
    }
  }
  return H;
}

// Eigenvalues as Rayleigh quotients of the computed vectors. The solver's own values carry
// an error of order u·‖H‖, which near a pole of the potential swamps the O(1) eigenvalues;
// for localized vectors the quotient is accurate to about u·|λ|.
Eigen::VectorXd sorted_spectrum(const Eigen::MatrixXd& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::MatrixXd& V = es.eigenvectors();
  const Eigen::MatrixXd HV = H * V;
  Eigen::VectorXd lam = (V.cwiseProduct(HV).colwise().sum().array() / V.colwise().squaredNorm().array()).transpose();
  std::sort(lam.data(), lam.data() + lam.size());
  return lam;
}

int site_boundary_distance(const Region& box, const IntVec& s) { return box.size - linf_norm(s - box.center); }

}  // namespace

void MarylandParams::validate() const {
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  if (alpha.size() != d) throw std::invalid_argument("alpha must have d components");
  if ((alpha.array() < 0.0).any() || (alpha.array() > 1.0).any()) throw std::invalid_argument("alpha outside [0,1]^d");
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (!(tau > d)) throw std::invalid_argument("tau must exceed d");
  if (!(theta >= 0.0 && theta < 1.0)) throw std::invalid_argument("theta must lie in [0,1)");
  if (!(singularity_tol > 0.0)) throw std::invalid_argument("singularity_tol must be positive");
}

long double site_phase_at(const Eigen::VectorXd& alpha, double theta, const IntVec& site) {
  return reduce_unit(static_cast<long double>(theta) + dot_alpha(alpha, site));
}

long double site_phase(const MarylandParams& params, const IntVec& site, double theta_shift) {
  return reduce_unit(static_cast<long double>(params.theta) + static_cast<long double>(theta_shift) +
                     dot_alpha(params.alpha, site));
}

double maryland_potential(long double phase) {
  // cot has period 1; centering the phase keeps sin accurate next to the pole at 1 and
  // makes the result exactly odd in the phase.
  const long double r = phase - std::nearbyint(phase);
  const long double x = kPiL * r;
  return static_cast<double>(std::cos(x) / std::sin(x));
}

DiophantineReport diophantine_check(const Eigen::VectorXd& alpha, double gamma, double tau, int j_max) {
  if (j_max < 1) throw std::invalid_argument("j_max must be at least 1");
  const int dim = static_cast<int>(alpha.size());
  DiophantineReport rep;
  rep.j_max = j_max;
  double best = std::numeric_limits<double>::infinity();
  for (const IntVec& j : enumerate_points(Region::box(dim, j_max))) {
    const int n1 = l1_norm(j);
    if (n1 == 0 || n1 > j_max) continue;
    const double dist = static_cast<double>(torus_norm(dot_alpha(alpha, j)));
    const double scaled = dist * std::pow(static_cast<double>(n1), tau);
    if (scaled < best) {
      best = scaled;
      rep.witness = j;
      rep.torus_distance = dist;
      rep.margin = dist - gamma / std::pow(static_cast<double>(n1), tau);
    }
  }
  rep.holds = best >= gamma;
  return rep;
}

Eigen::MatrixXd build_hamiltonian(const MarylandParams& params, const Region& box) {
  return assemble(params.alpha, params.eps, params.theta, params.singularity_tol, box);
}

Eigen::MatrixXd EigenSystem::hamiltonian() const { return build_hamiltonian(params, box); }

EigenSystem diagonalize_and_relabel(const MarylandParams& params, const Region& box, const MatchOptions& opts) {
  EigenSystem out;
  out.params = params;
  out.box = box;
  out.sites = enumerate_points(box);
  out.indexer = BoxIndexer(box.dim(), box.size, box.center);
  const Eigen::MatrixXd H = build_hamiltonian(params, box);
  const Index n = H.rows();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw Error("symmetric eigensolve failed");
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const Eigen::MatrixXd& psi = solver.eigenvectors();

  // Own peak of every eigenvector.
  std::vector<Index> peak_slot(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    const double top = psi.col(v).cwiseAbs().maxCoeff();
    Index best = -1;
    for (Index x = 0; x < n; ++x) {
      if (std::abs(psi(x, v)) < top * (1.0 - 1e-12)) continue;
      if (best < 0) {
        best = x;
        continue;
      }
      const IntVec& cand = out.sites[static_cast<std::size_t>(x)];
      const IntVec& cur = out.sites[static_cast<std::size_t>(best)];
      const int lc = linf_norm(cand - box.center), lb = linf_norm(cur - box.center);
      if (lc < lb || (lc == lb && lex_less(cand, cur))) best = x;
    }
    peak_slot[static_cast<std::size_t>(v)] = best;
  }

  // Edges vector → sites near its peak, heaviest first.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    const IntVec& c = out.sites[static_cast<std::size_t>(peak_slot[static_cast<std::size_t>(v)])];
    auto& row = adj[static_cast<std::size_t>(v)];
    for (Index x = 0; x < n; ++x)
      if (linf_norm(out.sites[static_cast<std::size_t>(x)] - c) <= opts.radius && psi(x, v) != 0.0)
        row.push_back(static_cast<int>(x));
    std::stable_sort(row.begin(), row.end(),
                     [&](int a, int b) { return std::abs(psi(a, v)) > std::abs(psi(b, v)); });
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(psi(peak_slot[static_cast<std::size_t>(a)], a)) >
           std::abs(psi(peak_slot[static_cast<std::size_t>(b)], b));
  });
  std::vector<int> initial(static_cast<std::size_t>(n), -1);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  for (Index v : order) {
    const Index c = peak_slot[static_cast<std::size_t>(v)];
    if (taken[static_cast<std::size_t>(c)]) continue;
    taken[static_cast<std::size_t>(c)] = 1;
    initial[static_cast<std::size_t>(v)] = static_cast<int>(c);
  }
  std::vector<int> vec_to_site = max_bipartite_matching(adj, static_cast<int>(n), initial);

  out.matching.radius = opts.radius;
  const bool perfect = std::none_of(vec_to_site.begin(), vec_to_site.end(), [](int s) { return s < 0; });
  out.matching.perfect_within_radius = perfect;
  if (!perfect) {
    out.matching.fallback_used = true;
    Eigen::MatrixXd w(n, n);
    for (Index v = 0; v < n; ++v)
      for (Index x = 0; x < n; ++x)
        w(v, x) = psi(x, v) == 0.0 ? -std::numeric_limits<double>::infinity() : psi(x, v) * psi(x, v);
    vec_to_site = max_weight_assignment(w);
    const auto missing = std::count(vec_to_site.begin(), vec_to_site.end(), -1);
    if (missing > 0) throw MatchingIncomplete(static_cast<int>(missing));
  }

  out.mu.resize(n);
  out.phi.resize(n, n);
  out.peak.resize(n);
  out.centers.resize(static_cast<std::size_t>(n));
  out.boundary_distance.resize(static_cast<std::size_t>(n));
  out.boundary_affected.resize(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    const Index s = vec_to_site[static_cast<std::size_t>(v)];
    Eigen::VectorXd col = psi.col(v);
    if (col(s) < 0.0 || (col(s) == 0.0 && col(peak_slot[static_cast<std::size_t>(v)]) < 0.0)) col = -col;
    out.phi.col(s) = col;
    out.mu(s) = lambda(v);
    out.peak(s) = std::abs(col(s));
    out.centers[static_cast<std::size_t>(s)] = out.sites[static_cast<std::size_t>(peak_slot[static_cast<std::size_t>(v)])];
    if (peak_slot[static_cast<std::size_t>(v)] != s) ++out.matching.off_center_labels;
  }
  for (Index s = 0; s < n; ++s) {
    const int bd = site_boundary_distance(box, out.sites[static_cast<std::size_t>(s)]);
    out.boundary_distance[static_cast<std::size_t>(s)] = bd;
    out.boundary_affected[static_cast<std::size_t>(s)] = bd < opts.boundary_layer;
  }
  return out;
}

EigenResidualReport eigen_residuals(const EigenSystem& es) {
  const Eigen::MatrixXd H = es.hamiltonian();
  EigenResidualReport rep;
  const Eigen::MatrixXd R = H * es.phi - es.phi * es.mu.asDiagonal();
  for (Index s = 0; s < es.size(); ++s)
    rep.max_residual = std::max(rep.max_residual, R.col(s).norm() / (1.0 + std::abs(es.mu(s))));
  const Eigen::MatrixXd G = es.phi.transpose() * es.phi - Eigen::MatrixXd::Identity(es.size(), es.size());
  rep.orthogonality_defect = G.cwiseAbs().maxCoeff();
  return rep;
}

ProfileReport eigenvalue_profile(const MarylandParams& params, int radius, const std::vector<double>& theta_grid) {
  ProfileReport rep;
  rep.theta = theta_grid;
  rep.energy.reserve(theta_grid.size());
  const Region box = Region::box(params.d, radius);
  const IntVec origin = IntVec::Zero(params.d);
  for (double th : theta_grid) {
    MarylandParams p = params;
    p.theta = th;
    const EigenSystem es = diagonalize_and_relabel(p, box);
    const double e = es.eigenvalue(origin);
    rep.energy.push_back(e);
    rep.max_potential_deviation =
        std::max(rep.max_potential_deviation, std::abs(e - maryland_potential(site_phase_at(p.alpha, th, origin))));
  }
  rep.min_decrease_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < theta_grid.size(); ++k) {
    const double dt = theta_grid[k + 1] - theta_grid[k];
    if (dt <= 0.0 || std::floor(theta_grid[k]) != std::floor(theta_grid[k + 1])) continue;
    const double slope = -(rep.energy[k + 1] - rep.energy[k]) / dt;
    rep.min_decrease_slope = std::min(rep.min_decrease_slope, slope);
    if (!(slope > 0.0)) rep.monotone = false;
  }
  return rep;
}

SymmetryReport check_symmetry(const MarylandParams& params, const Region& box) {
  if (!box.is_symmetric_box()) throw AsymmetricBox("symmetry check needs a box centered at the origin");
  const Eigen::VectorXd a = sorted_spectrum(
      assemble(params.alpha, params.eps, 1.0L - static_cast<long double>(params.theta), params.singularity_tol, box));
  const Eigen::VectorXd b = sorted_spectrum(build_hamiltonian(params, box));
  SymmetryReport rep;
  const Index n = a.size();
  for (Index k = 0; k < n; ++k) rep.defect = std::max(rep.defect, std::abs(a(k) + b(n - 1 - k)));
  return rep;
}

double check_translation_covariance(const MarylandParams& params, int radius, const IntVec& shift) {
  const Eigen::VectorXd a = sorted_spectrum(build_hamiltonian(params, Region::box(shift, radius)));
  const long double shifted = static_cast<long double>(params.theta) + dot_alpha(params.alpha, shift);
  const Eigen::VectorXd b = sorted_spectrum(
      assemble(params.alpha, params.eps, shifted, params.singularity_tol, Region::box(params.d, radius)));
  return (a - b).cwiseAbs().maxCoeff();
}

RellichTrace rellich_iterate(const MarylandParams& params, const std::vector<double>& theta_grid,
                             const std::vector<int>& schedule) {
  for (std::size_t k = 1; k < schedule.size(); ++k)
    if (schedule[k] <= schedule[k - 1]) throw std::invalid_argument("Rellich schedule must be strictly increasing");
  RellichTrace trace;
  trace.theta = theta_grid;
  const IntVec origin = IntVec::Zero(params.d);

  auto finish_slopes = [&](RellichLevel& lvl) {
    lvl.min_decrease_slope = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < theta_grid.size(); ++k) {
      const double dt = theta_grid[k + 1] - theta_grid[k];
      if (dt <= 0.0 || std::floor(theta_grid[k]) != std::floor(theta_grid[k + 1])) continue;
      const double slope = -(lvl.energy[k + 1] - lvl.energy[k]) / dt;
      lvl.min_decrease_slope = std::min(lvl.min_decrease_slope, slope);
      if (!(slope > 0.0)) lvl.monotone = false;
    }
  };

  RellichLevel base;
  for (double th : theta_grid) base.energy.push_back(maryland_potential(site_phase_at(params.alpha, th, origin)));
  finish_slopes(base);
  trace.levels.push_back(base);

  double prev_defect = params.eps;
  for (std::size_t lv = 0; lv < schedule.size(); ++lv) {
    RellichLevel cur;
    cur.level = static_cast<int>(lv + 1);
    cur.extent = schedule[lv];
    cur.disk_radius = 10.0 * (prev_defect + 1e-12);
    const Region box = Region::box(params.d, schedule[lv]);
    const auto& prev = trace.levels.back().energy;
    for (std::size_t g = 0; g < theta_grid.size(); ++g) {
      MarylandParams p = params;
      p.theta = theta_grid[g];
      const Eigen::VectorXd spec = sorted_spectrum(build_hamiltonian(p, box));
      const Eigen::VectorXd gap = (spec.array() - prev[g]).abs();
      Index best = 0;
      gap.minCoeff(&best);
      if ((gap.array() <= cur.disk_radius).count() > 1) cur.non_unique.push_back(static_cast<int>(g));
      cur.energy.push_back(spec(best));
      cur.sup_defect = std::max(cur.sup_defect, gap(best));
    }
    finish_slopes(cur);
    prev_defect = cur.sup_defect;
    trace.levels.push_back(std::move(cur));
  }
  return trace;
}

EquidistributionReport center_equidistribution(const EigenSystem& es, int window, int margin) {
  if (window < 1) throw std::invalid_argument("window must be positive");
  EquidistributionReport rep;
  rep.window = window;
  const int dim = es.d();
  const IntVec lo = es.box.lower().array() + margin;
  const IntVec hi = es.box.upper().array() - margin;
  IntVec tiles(dim);
  for (int k = 0; k < dim; ++k) tiles(k) = std::max(0, (hi(k) - lo(k) + 1) / window);
  if ((tiles.array() == 0).any()) return rep;
  // Tile origins enumerated as a box of tile indices.
  const int tmax = tiles.maxCoeff();
  for (const IntVec& t : enumerate_points(Region::box(IntVec::Constant(dim, tmax), tmax))) {
    if ((t.array() < 0).any() || (t.array() >= tiles.array()).any()) continue;
    rep.window_origin.push_back(lo.array() - 1 + t.array() * window);
  }
  rep.counts.assign(rep.window_origin.size(), 0);
  for (const IntVec& c : es.centers) {
    for (std::size_t w = 0; w < rep.window_origin.size(); ++w) {
      const IntVec rel = c - rep.window_origin[w];
      if ((rel.array() >= 1).all() && (rel.array() <= window).all()) {
        ++rep.counts[w];
        break;
      }
    }
  }
  const double vol = std::pow(static_cast<double>(window), dim);
  const auto [mn, mx] = std::minmax_element(rep.counts.begin(), rep.counts.end());
  rep.min_ratio = *mn / vol;
  rep.max_ratio = *mx / vol;
  return rep;
}

std::vector<DecayFit> interior_decay(const EigenSystem& es, int min_boundary_distance, double floor) {
  std::vector<DecayFit> fits;
  for (Index s = 0; s < es.size(); ++s) {
    if (es.boundary_distance[static_cast<std::size_t>(s)] < min_boundary_distance) continue;
    DecayFit f;
    f.site = es.sites[static_cast<std::size_t>(s)];
    std::vector<double> xs, ys;
    for (Index x = 0; x < es.size(); ++x) {
      const double a = std::abs(es.phi(x, s));
      if (a <= floor) continue;
      xs.push_back(l1_norm(es.sites[static_cast<std::size_t>(x)] - f.site));
      ys.push_back(std::log(a));
    }
    f.points = static_cast<int>(xs.size());
    f.slope = xs.size() >= 2 && *std::max_element(xs.begin(), xs.end()) > 0.0
                  ? linear_fit(xs, ys).slope
                  : -std::numeric_limits<double>::infinity();
    fits.push_back(std::move(f));
  }
  return fits;
}

std::optional<double> poisson_consistency(const EigenSystem& es, const IntVec& label, int annulus_radius,
                                          double cond_limit) {
  const Index s = es.slot(label);
  if (s < 0) throw std::invalid_argument("label outside the box");
  std::vector<Index> lam;
  for (Index x = 0; x < es.size(); ++x) {
    const int r = linf_norm(es.sites[static_cast<std::size_t>(x)] - label);
    if (r >= 1 && r <= annulus_radius) lam.push_back(x);
  }
  const Index m = static_cast<Index>(lam.size());
  std::vector<Index> pos(static_cast<std::size_t>(es.size()), -1);
  for (Index k = 0; k < m; ++k) pos[static_cast<std::size_t>(lam[static_cast<std::size_t>(k)])] = k;

  const Eigen::MatrixXd H = es.hamiltonian();
  Eigen::MatrixXd A(m, m);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < m; ++b) A(a, b) = H(lam[static_cast<std::size_t>(a)], lam[static_cast<std::size_t>(b)]);
  A.diagonal().array() -= es.mu(s);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  if (sv(m - 1) == 0.0 || sv(0) / sv(m - 1) > cond_limit) return std::nullopt;

  // Boundary source: couplings from Λ to sites outside Λ.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Index a = 0; a < m; ++a) {
    const Index w = lam[static_cast<std::size_t>(a)];
    for (Index y = 0; y < es.size(); ++y) {
      if (pos[static_cast<std::size_t>(y)] >= 0 || y == w || H(w, y) == 0.0) continue;
      rhs(a) -= H(w, y) * es.phi(y, s);
    }
  }
  const Eigen::VectorXd rebuilt = A.partialPivLu().solve(rhs);
  double defect = 0.0;
  for (Index a = 0; a < m; ++a)
    defect = std::max(defect, std::abs(rebuilt(a) - es.phi(lam[static_cast<std::size_t>(a)], s)));
  return defect;
}

std::vector<double> midpoint_grid(int count) {
  std::vector<double> g(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) g[static_cast<std::size_t>(k)] = (k + 0.5) / count;
  return g;
}

}  // namespace maryland
