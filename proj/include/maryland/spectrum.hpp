#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "maryland/lattice.hpp"

namespace maryland {

/// Parameters of the Maryland operator εΔ + cot π(θ + j·α) on Z^d.
struct MarylandParams {
  int d = 1;
  double eps = 0.0;
  Eigen::VectorXd alpha;
  double theta = 0.0;
  double gamma = 0.1;
  double tau = 2.0;
  double singularity_tol = 1e-6;

  /// Throws std::invalid_argument on violated constraints.
  void validate() const;
};

/// (√5 − 1)/2.
inline double golden_frequency() { return 0.61803398874989484820; }

/// θ + j·α reduced to [0, 1), accumulated in extended precision.
long double site_phase(const MarylandParams& params, const IntVec& site, double theta_shift = 0.0);
/// Same with an explicit phase θ.
long double site_phase_at(const Eigen::VectorXd& alpha, double theta, const IntVec& site);

/// The quasi-periodic potential V evaluated on a reduced phase. Only cot π(·) is provided.
double maryland_potential(long double phase);

struct DiophantineReport {
  bool holds = true;
  IntVec witness;            // minimizer of ‖j·α‖·|j|₁^τ
  double torus_distance = 0;  // ‖witness·α‖
  double margin = 0;          // ‖j·α‖ − γ/|j|₁^τ at the witness
  int j_max = 0;
};

/// Scan 0 < |j|₁ ≤ j_max for ‖j·α‖ ≥ γ/|j|₁^τ.
DiophantineReport diophantine_check(const Eigen::VectorXd& alpha, double gamma, double tau, int j_max);

/// Dirichlet restriction of the operator to a full box of Z^d. Rows follow the
/// lexicographic site order of `enumerate_points(box)`.
Eigen::MatrixXd build_hamiltonian(const MarylandParams& params, const Region& box);

struct MatchOptions {
  int radius = 2;
  int boundary_layer = 4;
};

struct MatchingDiagnostics {
  int radius = 2;
  bool perfect_within_radius = true;
  bool fallback_used = false;
  int off_center_labels = 0;  // labels whose site differs from the vector's own peak
};

/// Eigenpairs of a finite box relabelled by localization center.
struct EigenSystem {
  MarylandParams params;
  Region box;
  std::vector<IntVec> sites;      // lexicographic
  BoxIndexer indexer;             // site → slot
  Eigen::VectorXd mu;             // mu(s): eigenvalue labelled by sites[s]
  Eigen::MatrixXd phi;            // phi(x, s) = φ_{sites[s]}(sites[x])
  std::vector<IntVec> centers;    // own peak of the vector labelled s
  Eigen::VectorXd peak;           // |φ_s(s)|
  std::vector<int> boundary_distance;
  std::vector<char> boundary_affected;
  MatchingDiagnostics matching;

  Index size() const { return static_cast<Index>(sites.size()); }
  int d() const { return params.d; }
  int radius() const { return box.size; }
  /// Slot of a site, -1 when outside the box.
  Index slot(const IntVec& site) const { return indexer.contains(site) ? indexer.encode(site) : -1; }
  double eigenvalue(const IntVec& site) const { return mu(slot(site)); }
  Eigen::MatrixXd hamiltonian() const;
};

EigenSystem diagonalize_and_relabel(const MarylandParams& params, const Region& box, const MatchOptions& opts = {});

struct EigenResidualReport {
  double max_residual = 0;        // max ‖Hφ − μφ‖ / (1 + |μ|)
  double orthogonality_defect = 0;  // max |ΦᵀΦ − I|
};

EigenResidualReport eigen_residuals(const EigenSystem& es);

struct ProfileReport {
  std::vector<double> theta;
  std::vector<double> energy;
  double max_potential_deviation = 0;  // sup |E(θ) − cot πθ|
  double min_decrease_slope = 0;       // min over consecutive pairs of −ΔE/Δθ
  bool monotone = true;                // strictly decreasing on every pole-free branch
};

/// E(θ) := μ_0(θ) on the symmetric box of radius L.
ProfileReport eigenvalue_profile(const MarylandParams& params, int radius, const std::vector<double>& theta_grid);

struct SymmetryReport {
  double defect = 0;  // max |λ_k(H(1−θ)) + λ_{n−k}(H(θ))| over sorted spectra
};

SymmetryReport check_symmetry(const MarylandParams& params, const Region& box);

/// max discrepancy between spec H_{Q_L(m)}(θ) and spec H_{Q_L(0)}(θ + m·α).
double check_translation_covariance(const MarylandParams& params, int radius, const IntVec& shift);

struct RellichLevel {
  int level = 0;
  int extent = 0;  // block B_n = Q_extent
  std::vector<double> energy;
  double sup_defect = 0;      // sup_θ |E_n − E_{n−1}|
  double disk_radius = 0;
  std::vector<int> non_unique;  // grid slots with two candidates inside the disk
  double min_decrease_slope = 0;
  bool monotone = true;
};

struct RellichTrace {
  std::vector<double> theta;
  std::vector<RellichLevel> levels;  // levels[0] is E_0 = V
};

/// Track E_n(θ) through blocks Q_{l_1} ⊂ Q_{l_2} ⊂ … starting from E_0 = cot πθ.
RellichTrace rellich_iterate(const MarylandParams& params, const std::vector<double>& theta_grid,
                             const std::vector<int>& schedule);

struct EquidistributionReport {
  int window = 0;
  std::vector<IntVec> window_origin;  // window is origin + (0, L_w]^d
  std::vector<int> counts;
  double min_ratio = 0;  // min count / L_w^d
  double max_ratio = 0;
};

/// Localization centers per window tiling the sub-box `margin` sites away from the boundary.
EquidistributionReport center_equidistribution(const EigenSystem& es, int window, int margin);

struct DecayFit {
  IntVec site;
  double slope = 0;   // least-squares slope of log|φ_j(x)| against |x − j|₁
  int points = 0;
};

/// Decay slopes of labels at least `min_boundary_distance` from the boundary, using entries above `floor`.
std::vector<DecayFit> interior_decay(const EigenSystem& es, int min_boundary_distance, double floor = 1e-12);

/// Reconstruct φ on an annulus around its center from boundary values through the
/// restricted Green's function. Returns max |φ(x) − reconstruction(x)|, or nullopt when
/// (H_Λ − μ) is too ill-conditioned for the comparison.
std::optional<double> poisson_consistency(const EigenSystem& es, const IntVec& label, int annulus_radius,
                                          double cond_limit = 1e10);

/// Pole-free uniform grid (k + 1/2)/count, k = 0..count−1.
std::vector<double> midpoint_grid(int count);

}  // namespace maryland
