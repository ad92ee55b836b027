#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "maryland/spectrum.hpp"

namespace maryland {

/// Outcome of one separation or non-resonance predicate.
struct PredicateEntry {
  std::string id;  // pair-separation, magnitude, first-melnikov-plus/minus, second-melnikov, dio-omega, melnikov-omega
  bool holds = true;
  double value = 0;      // worst observed quantity (minimum unless stated)
  double threshold = 0;  // lower bound it is compared against
  double margin = 0;     // value − threshold
  std::vector<std::pair<std::string, IntVec>> witness;
  int range = 0;              // scan radius
  long long scanned = 0;      // number of index tuples inspected
  // magnitude only
  double max_value = 0;
  double upper_threshold = 0;
  bool lower_holds = true;
  bool upper_holds = true;
  // second-melnikov only: n = 0, j = j' tuples outside the exempt set
  long long trivial_degenerate = 0;
  bool holds_excluding_trivial = true;
  double value_excluding_trivial = 0;
  // omega ladder only
  int scale = 0;
};

struct SeparationReport {
  std::vector<PredicateEntry> entries;
  /// Every entry holds, with second-melnikov judged on its non-trivial tuples.
  bool all_hold() const;
};

/// ω⁽⁰⁾ = (μ_{β_1}, …, μ_{β_b}).
Eigen::VectorXd omega_zero(const EigenSystem& es, const std::vector<IntVec>& beta);

/// Sites of the eigensystem with |j|_∞ ≤ N. Throws if the box does not contain them.
std::vector<Index> sites_within(const EigenSystem& es, int N);

PredicateEntry check_pair_separation(const EigenSystem& es, int N);
PredicateEntry check_magnitude_bounds(const EigenSystem& es, int N);

/// |s·n·ω + μ_j| ≥ threshold over [−R,R]^{b+d} minus {(−s·e_k, β_k)}; s = ±1 selects the sector.
PredicateEntry check_first_melnikov(const EigenSystem& es, const Eigen::VectorXd& omega0,
                                    const std::vector<IntVec>& beta, int R, double threshold, int sign = +1);

/// |n·ω + μ_j − μ_{j'}| > threshold over [−R,R]^{b+2d} minus the exempt set.
PredicateEntry check_second_melnikov(const EigenSystem& es, const Eigen::VectorXd& omega0,
                                     const std::vector<IntVec>& beta, int R, double threshold);

/// Diophantine and weak second Melnikov conditions on ω for each Ñ on the ladder
/// scale_floor, 2·scale_floor, … ≤ N (N itself included), threshold e^{−Ñ^{1/K₂}}.
/// Site ranges are clipped to the box of the eigensystem.
std::vector<PredicateEntry> check_omega_hypotheses(const EigenSystem& es, const Eigen::VectorXd& omega, int N,
                                                   int scale_floor, double K2);

/// Default threshold 2δ^{1/8}.
inline double melnikov_threshold(double delta) { return 2.0 * std::pow(delta, 0.125); }

/// All five separation and Melnikov predicates on one eigensystem.
SeparationReport separation_report(const EigenSystem& es, const std::vector<IntVec>& beta, int N, int R,
                                   double delta);

/// Coefficients of P_p with d^p/dx^p tan x = (1 + tan² x)·P_p(tan x), p = 1…order.
std::vector<Eigen::VectorXd> tan_derivative_polys(int order);

/// d^p/dθ^p tan πθ for p = 0…order.
Eigen::VectorXd tan_pi_derivatives(double theta, int order);

struct TransversalitySample {
  double theta = 0;
  double F = 0;
  Eigen::VectorXd D;  // F', …, F^{(s)}
  double det_direct = 0;
  double det_product = 0;
};

struct TransversalityReport {
  std::vector<TransversalitySample> samples;
  double min_abs_F = 0;
  double min_derivative_stack = 0;  // min over θ of max_p |D(p)|
  double max_det_disagreement = 0;  // relative
};

/// W(p, q) = g^{(p)}(θ + ½ + j_q·α), g = tan π(·), p, q = 1…s.
Eigen::MatrixXd transversality_matrix(const Eigen::VectorXd& alpha, double theta, const std::vector<IntVec>& sites);

/// Closed Vandermonde form of det W.
double transversality_det_product(const Eigen::VectorXd& alpha, double theta, const std::vector<IntVec>& sites);

TransversalityReport transversality_scan(const Eigen::VectorXd& alpha, const std::vector<double>& theta_grid,
                                         const Eigen::VectorXi& k, const std::vector<IntVec>& sites,
                                         double pole_tol = 1e-6);

struct MonteCarloRow {
  double delta = 0;
  double epsilon = 0;
  double fraction_failed = 0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

struct ThetaSweepOptions {
  int box_radius = 10;
  int N = 4;  // separation and magnitude scan radius
  int R = 3;  // Melnikov scan radius
  int samples = 200;
  int threads = 1;
};

/// Fraction of uniformly sampled θ for which some separation predicate fails (the n = 0, j = j'
/// tuples of second-melnikov are not counted as failures).
MonteCarloRow theta_monte_carlo(const MarylandParams& base, const std::vector<IntVec>& beta, double delta,
                                const ThetaSweepOptions& opts, std::uint64_t seed);

}  // namespace maryland
