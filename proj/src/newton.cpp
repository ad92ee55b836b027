#include "maryland/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/LU>

#include "maryland/errors.hpp"
#include "maryland/fit.hpp"
#include "maryland/rng.hpp"

namespace maryland {

namespace {

double dot(const Eigen::VectorXd& omega, const IntVec& n) {
  double acc = 0.0;
  for (Index k = 0; k < n.size(); ++k) acc += n(k) * omega(k);
  return acc;
}

int ipow(int base, int e) {
  long long v = 1;
  for (int i = 0; i < e; ++i) {
    v *= base;
    if (v > (1 << 28)) return 1 << 28;
  }
  return static_cast<int>(v);
}

}  // namespace

Eigen::VectorXd q_update(const Coeffs& u, const EigenSystem& es, double delta, int p, const ResonantSet& S) {
  Eigen::VectorXd w(S.b());
  const Coeffs W = delta != 0.0 ? nonlinear_term(u, es, p) : Coeffs(u.b(), u.d(), 0, u.space_radius());
  for (int k = 0; k < S.b(); ++k) {
    const IntVec& beta = S.beta[static_cast<std::size_t>(k)];
    const Index s = es.slot(beta);
    if (s < 0) throw std::invalid_argument("anchor site outside the eigensystem box");
    const double a = S.a[static_cast<std::size_t>(k)];
    if (a == 0.0) throw std::invalid_argument("anchor amplitude must be nonzero");
    w(k) = es.mu(s) + delta * W.u(-unit_vector(S.b(), k), beta).real() / a;
  }
  return w;
}

NewtonState initial_state(const EigenSystem& es, const ResonantSet& S, const SolverConfig& cfg) {
  NewtonState st;
  st.u = S.initial(es.d(), 1, es.radius());
  st.omega = q_update(st.u, es, cfg.delta, cfg.p, S);
  const Residual res = residual(st.u, es, st.omega, cfg.delta, cfg.p, S);
  st.residual_norm = res.norm;
  st.residual_tail = res.tail;
  st.residual_history.push_back(res.norm);
  return st;
}

ModeList newton_modes(int b, int d, int time_radius, int space_radius, const ResonantSet& S) {
  const auto ns = enumerate_points(Region::box(b, time_radius));
  const auto js = enumerate_points(Region::box(d, space_radius));
  std::vector<ModeIndex> modes;
  modes.reserve(2 * ns.size() * js.size());
  for (Sector s : {Sector::plus, Sector::minus})
    for (const IntVec& n : ns)
      for (const IntVec& j : js)
        if (!S.contains(s, n, j)) modes.push_back({s, n, j});
  return ModeList(std::move(modes), b, d);
}

NewtonState newton_step(const NewtonState& state, const EigenSystem& es, const ResonantSet& S,
                        const SolverConfig& cfg) {
  NewtonState next = state;
  const int N = ipow(cfg.M, state.r + 1);
  const int T = std::max(1, std::min(N, cfg.max_time_radius));
  const int R = std::min(N, es.radius());
  next.scale = N;
  next.u = state.u.resized(std::max(T, state.u.time_radius()), es.radius());

  const Residual F = residual(next.u, es, state.omega, cfg.delta, cfg.p, S);
  const ModeList modes = newton_modes(S.b(), es.d(), T, R, S);
  const Index m = modes.size();
  Eigen::VectorXcd rhs(m);
  for (Index a = 0; a < m; ++a) {
    const auto& md = modes[a];
    rhs(a) = -(md.sign == Sector::plus ? F.plus.u(md.n, md.j) : F.minus.u(md.n, md.j));
  }

  Eigen::VectorXcd delta_x = Eigen::VectorXcd::Zero(m);
  double cond = 1.0;
  if (rhs.norm() > 0.0) {
    const Eigen::MatrixXcd Tm = linearized_operator(next.u, es, state.omega, 0.0, cfg.delta, cfg.p, modes);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Tm);
    const double rc = lu.rcond();
    cond = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (cond > cfg.cond_limit) throw IllConditioned(cond);
    delta_x = lu.solve(rhs);
    delta_x += lu.solve(rhs - Tm * delta_x);
  }

  double mismatch = 0.0;
  for (Index a = 0; a < m; ++a) {
    const auto& md = modes[a];
    if (md.sign != Sector::plus) continue;
    next.u.set(md.n, md.j, next.u.u(md.n, md.j) + delta_x(a));
    const Index b = modes.find(Sector::minus, -md.n, md.j);
    if (b >= 0) mismatch = std::max(mismatch, std::abs(delta_x(b) - std::conj(delta_x(a))));
  }
  S.impose(next.u);

  const Residual after = residual(next.u, es, state.omega, cfg.delta, cfg.p, S);
  if (state.residual_norm > cfg.progress_floor && !(after.norm < cfg.progress_factor * state.residual_norm))
    throw NoProgress(state.residual_norm, after.norm);

  next.r = state.r + 1;
  next.residual_norm = after.norm;
  next.residual_tail = after.tail;
  next.last_correction_norm = delta_x.norm();
  next.last_condition = cond;
  next.conjugate_mismatch = mismatch;
  next.correction_history.push_back(next.last_correction_norm);
  next.condition_history.push_back(cond);
  next.scale_history.push_back(N);
  return next;
}

DecayFitResult decay_fit(const Coeffs& u, const ResonantSet& S, double eps, double delta) {
  DecayFitResult out;
  out.bound = std::sqrt(eps + delta);
  const double rho_max = std::abs(std::log(eps + delta));
  const auto& ti = u.time_index();
  const auto& si = u.space_index();
  std::vector<double> mags, dist;
  double top = 0.0;
  for (Index t = 0; t < u.time_size(); ++t) {
    const IntVec n = ti.decode(t);
    for (Index s = 0; s < u.space_size(); ++s) {
      const double a = std::abs(u.values()(t, s));
      if (a == 0.0) continue;
      const IntVec j = si.decode(s);
      top = std::max(top, a);
      if (S.contains(Sector::plus, n, j)) continue;
      mags.push_back(a);
      dist.push_back(linf_norm(n) + linf_norm(j));
    }
  }
  constexpr int kGrid = 100;
  for (int i = 0; i < kGrid; ++i) {
    const double rho = rho_max * i / (kGrid - 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < mags.size(); ++k) sum += mags[k] * std::exp(rho * dist[k]);
    out.rho_grid.push_back(rho);
    out.weighted_sums.push_back(sum);
    if (sum <= out.bound) {
      out.any_pass = true;
      out.rho_star = rho;
      out.sum_at_rho_star = sum;
    }
  }
  // Slope over every stored amplitude above the relative floor, anchors included.
  std::vector<double> xs, ys;
  for (Index t = 0; t < u.time_size(); ++t)
    for (Index s = 0; s < u.space_size(); ++s) {
      const double a = std::abs(u.values()(t, s));
      if (a <= 1e-14 * top) continue;
      xs.push_back(linf_norm(ti.decode(t)) + linf_norm(si.decode(s)));
      ys.push_back(std::log(a));
    }
  out.points = static_cast<int>(xs.size());
  if (xs.size() >= 2 && *std::max_element(xs.begin(), xs.end()) > *std::min_element(xs.begin(), xs.end()))
    out.slope = linear_fit(xs, ys).slope;
  return out;
}

Eigen::MatrixXcd evaluate_time_domain(const Coeffs& u, const Eigen::VectorXd& omega, const EigenSystem& es,
                                      const std::vector<double>& times) {
  const ModeField U = to_field(u, es);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Index>(times.size()), es.size());
  for (std::size_t i = 0; i < times.size(); ++i)
    for (Index t = 0; t < U.time.size(); ++t) {
      const double phase = dot(omega, U.time.decode(t)) * times[i];
      out.row(static_cast<Index>(i)) += std::polar(1.0, phase) * U.values.row(t);
    }
  return out;
}

TimeResidual time_residual(const Coeffs& u, const Eigen::VectorXd& omega, const EigenSystem& es, double delta, int p,
                           const std::vector<double>& times) {
  const ModeField U = to_field(u, es);
  const Eigen::MatrixXcd H = es.hamiltonian().cast<Complex>();
  TimeResidual out;
  out.times = times;
  for (double t : times) {
    Eigen::VectorXcd val = Eigen::VectorXcd::Zero(es.size());
    Eigen::VectorXcd idt = Eigen::VectorXcd::Zero(es.size());  // i ∂_t u
    for (Index k = 0; k < U.time.size(); ++k) {
      const double nw = dot(omega, U.time.decode(k));
      const Complex e = std::polar(1.0, nw * t);
      val += e * U.values.row(k).transpose();
      idt -= nw * e * U.values.row(k).transpose();
    }
    Eigen::VectorXcd res = idt - H * val;
    for (Index x = 0; x < es.size(); ++x) res(x) -= delta * std::pow(std::norm(val(x)), p) * val(x);
    const double worst = res.cwiseAbs().maxCoeff();
    out.per_time.push_back(worst);
    out.max_residual = std::max(out.max_residual, worst);
  }
  return out;
}

double convergence_order(const std::vector<double>& history, double floor) {
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k + 1 < history.size(); ++k) {
    if (!(history[k] > floor && history[k + 1] > floor)) continue;
    xs.push_back(std::log(history[k]));
    ys.push_back(std::log(history[k + 1]));
  }
  if (xs.empty()) return 0.0;
  if (xs.size() == 1) return ys[0] / xs[0];
  return linear_fit(xs, ys).slope;
}

SolutionReport cwb_solve(const EigenSystem& es, const ResonantSet& S, const SolverConfig& cfg) {
  S.validate(es.d(), -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  SolutionReport rep;
  rep.omega0.resize(S.b());
  rep.A.resize(S.b());
  for (int k = 0; k < S.b(); ++k) {
    const Index s = es.slot(S.beta[static_cast<std::size_t>(k)]);
    if (s < 0) throw std::invalid_argument("anchor site outside the eigensystem box");
    rep.omega0(k) = es.mu(s);
    rep.A(k) = es.phi.col(s).array().abs().pow(2 * cfg.p + 2).sum();
  }

  NewtonState st = initial_state(es, S, cfg);
  rep.omega_first = st.omega;
  if (cfg.delta != 0.0) {
    while (st.residual_norm > cfg.tol) {
      if (st.r >= cfg.max_r) throw DidNotConverge("iteration limit reached", st.residual_history);
      st = newton_step(st, es, S, cfg);
      st.omega = q_update(st.u, es, cfg.delta, cfg.p, S);
      const Residual res = residual(st.u, es, st.omega, cfg.delta, cfg.p, S);
      st.residual_norm = res.norm;
      st.residual_tail = res.tail;
      st.residual_history.push_back(res.norm);
      rep.max_conjugate_mismatch = std::max(rep.max_conjugate_mismatch, st.conjugate_mismatch);
      for (int k = 0; k < S.b(); ++k)
        if (st.u.u(-unit_vector(S.b(), k), S.beta[static_cast<std::size_t>(k)]) !=
            Complex(S.a[static_cast<std::size_t>(k)], 0.0))
          rep.anchors_held = false;
    }
  }
  rep.converged = true;
  rep.u = st.u;
  rep.omega = st.omega;
  rep.iterations = st.r;
  rep.residual_history = st.residual_history;
  rep.correction_history = st.correction_history;
  rep.condition_history = st.condition_history;
  rep.scale_history = st.scale_history;
  for (std::size_t k = 1; k < rep.scale_history.size(); ++k)
    if (rep.scale_history[k] <= rep.scale_history[k - 1]) rep.block_growth = false;
  for (std::size_t k = 2; k < rep.residual_history.size(); ++k)
    if (!(rep.residual_history[k] < rep.residual_history[k - 1])) rep.monotone_decay = false;
  rep.quadratic_slope = convergence_order(rep.residual_history);
  rep.decay = decay_fit(rep.u, S, es.params.eps, cfg.delta);

  Rng rng(cfg.seed, "time-residual");
  std::vector<double> times(static_cast<std::size_t>(cfg.time_samples));
  for (double& t : times) t = rng.uniform(0.0, cfg.time_span);
  rep.time = time_residual(rep.u, rep.omega, es, cfg.delta, cfg.p, times);
  return rep;
}

}  // namespace maryland
