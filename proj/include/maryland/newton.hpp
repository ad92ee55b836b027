#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "maryland/nonlinear.hpp"

namespace maryland {

struct SolverConfig {
  int p = 1;
  double delta = 1e-3;
  int M = 3;                   // scale multiplier, N = M^{r+1}
  double tol = 1e-10;
  int max_r = 8;
  int max_time_radius = 3;     // cap on the time radius of the Newton block
  double cond_limit = 1e12;
  double progress_factor = 1.0;  // NoProgress unless residual_after < factor · residual_before
  double progress_floor = 1e-14;
  std::uint64_t seed = 0;
  int time_samples = 50;
  double time_span = 100.0;
};

struct NewtonState {
  int r = 0;
  Coeffs u;
  Eigen::VectorXd omega;
  double residual_norm = 0;
  double residual_tail = 0;
  double last_correction_norm = 0;
  int scale = 0;  // N of the last step
  double last_condition = 0;
  double conjugate_mismatch = 0;  // max |Δv(n,j) − conj Δu(−n,j)| of the last step
  std::vector<double> residual_history;
  std::vector<double> correction_history;
  std::vector<double> condition_history;
  std::vector<int> scale_history;
};

/// ω_k = μ_{β_k} + δ W_u(−e_k, β_k)/a_k (real part).
Eigen::VectorXd q_update(const Coeffs& u, const EigenSystem& es, double delta, int p, const ResonantSet& S);

/// u⁽⁰⁾ with ω from q_update, residual recorded as history[0].
NewtonState initial_state(const EigenSystem& es, const ResonantSet& S, const SolverConfig& cfg);

/// Unknown modes of the Newton block: {±} × [−T, T]^b × [−R, R]^d minus S.
ModeList newton_modes(int b, int d, int time_radius, int space_radius, const ResonantSet& S);

/// One multiscale correction at fixed ω. Throws IllConditioned or NoProgress.
NewtonState newton_step(const NewtonState& state, const EigenSystem& es, const ResonantSet& S,
                        const SolverConfig& cfg);

struct DecayFitResult {
  std::vector<double> rho_grid;
  std::vector<double> weighted_sums;
  double bound = 0;  // √(ε + δ)
  double rho_star = 0;
  bool any_pass = false;
  double sum_at_rho_star = 0;
  double slope = 0;  // least-squares slope of log|û| against |n| + |j|
  int points = 0;
};

/// Weighted ℓ¹ sum of |û| e^{ρ(|n|+|j|)} off S₀ on 100 points of [0, |log(ε+δ)|].
DecayFitResult decay_fit(const Coeffs& u, const ResonantSet& S, double eps, double delta);

/// u(t, x) for the given times (rows) and all box sites (columns).
Eigen::MatrixXcd evaluate_time_domain(const Coeffs& u, const Eigen::VectorXd& omega, const EigenSystem& es,
                                      const std::vector<double>& times);

struct TimeResidual {
  std::vector<double> times;
  std::vector<double> per_time;  // max over x
  double max_residual = 0;
};

/// max_x |i∂_t u − Hu − δ|u|^{2p}u| at each time, with H rebuilt from the eigensystem parameters.
TimeResidual time_residual(const Coeffs& u, const Eigen::VectorXd& omega, const EigenSystem& es, double delta, int p,
                           const std::vector<double>& times);

/// Order estimate from a residual history: least-squares slope of log r_{k+1} against log r_k
/// over pairs with both terms above `floor`; with a single pair, the ratio of the logs.
double convergence_order(const std::vector<double>& history, double floor = 1e-14);

struct SolutionReport {
  Coeffs u;
  Eigen::VectorXd omega;
  Eigen::VectorXd omega0;
  Eigen::VectorXd omega_first;  // q_update at u⁽⁰⁾
  Eigen::VectorXd A;            // Σ_x |φ_{β_k}(x)|^{2p+2}
  std::vector<double> residual_history;
  std::vector<double> correction_history;
  std::vector<double> condition_history;
  std::vector<int> scale_history;
  int iterations = 0;
  bool converged = false;
  bool anchors_held = true;
  bool block_growth = true;
  bool monotone_decay = true;
  double quadratic_slope = 0;
  double max_conjugate_mismatch = 0;
  DecayFitResult decay;
  TimeResidual time;
};

/// Alternate newton_step and q_update until the residual reaches cfg.tol.
/// Throws DidNotConverge carrying the residual history.
SolutionReport cwb_solve(const EigenSystem& es, const ResonantSet& S, const SolverConfig& cfg);

}  // namespace maryland
