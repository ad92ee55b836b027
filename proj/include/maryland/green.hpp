#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "maryland/coeffs.hpp"
#include "maryland/lattice.hpp"

namespace maryland {

/// ‖m − m'‖ = |n − n'|∞ + |j − j'|∞, the sector is ignored.
int mode_distance(const ModeIndex& a, const ModeIndex& b);

/// Operator on an explicit list of modes.
struct RestrictedOperator {
  Eigen::MatrixXcd T;
  ModeList modes;
};

/// Rows and columns of `op` whose point (n, j) lies in the region.
RestrictedOperator restrict_to(const RestrictedOperator& op, const Region& region);

/// T(σ) on the modes of a region of Z^{b+d}.
RestrictedOperator restricted_operator(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega,
                                       double sigma, double delta, int p, const Region& region);

struct GreenReport {
  double inv_norm = 0;   // largest singular value of T⁻¹
  double sigma_min = 0;  // smallest singular value of T
  double hs_norm = 0;    // Frobenius norm of T⁻¹
  std::vector<double> max_by_distance;  // index = ‖m − m'‖
  int fit_from = 0;                     // first distance used by the fit
  bool rate_available = false;          // false: insufficient-range
  double rate = 0;                      // −slope of log max|G| against distance
  int bins = 0;
  Eigen::MatrixXcd G;
};

/// Minimum number of distance bins for a decay-rate fit.
inline constexpr int kMinRateBins = 8;

/// Norm of the inverse, per-distance max |G| and a log-linear rate over distances ≥ √N.
/// Throws SingularRestriction.
GreenReport green_norm_and_decay(const RestrictedOperator& op, int N);

/// max |G(m, m')| e^{c‖m − m'‖} over ‖m − m'‖ ≥ from; ≤ 1 means the decay bound holds.
double decay_excess(const Eigen::MatrixXcd& G, const ModeList& modes, double c, double from);

struct LdtOptions {
  std::vector<int> scales{6, 10};
  std::vector<IntVec> j0;  // centers Λ_N(j₀); empty means {0}
  int sigma_samples = 2000;
  double sigma_lo = -10.0;
  double sigma_hi = 10.0;
  double rate = 0.5;  // c̃
  std::uint64_t seed = 0;
  bool hilbert_schmidt = false;
  int threads = 1;
  long long mode_cap = 200'000;
};

struct LdtSample {
  double sigma = 0;
  double inv_norm = 0;      // max over the regions, HS norm when requested
  double decay_excess = 0;  // max over the regions
  bool norm_ok = true;
  bool decay_ok = true;
  double rate = 0;  // NaN when the fit has too few bins
};

struct LdtScaleReport {
  int N = 0;
  std::vector<IntVec> j0;
  int samples = 0;
  std::uint64_t seed = 0;
  double sigma_lo = 0;
  double sigma_hi = 0;
  double rate = 0;
  std::string norm_kind;
  bool closed_form = false;  // δ = 0 diagonal path
  long long region_modes = 0;
  int components = 0;  // blocks of T after splitting on zero couplings
  double norm_threshold = 0;  // e^{N^{9/10}}
  double measure_bound = 0;   // e^{−N^{1/30}}, reported only
  double fraction_norm_failed = 0;
  double fraction_decay_failed = 0;
  double fraction_failed = 0;
  std::vector<double> failing_sigma;
  int rate_insufficient = 0;
  double rate_min = 0;
  double rate_median = 0;
  double rate_max = 0;
  std::vector<LdtSample> per_sample;
};

struct MonotonicityCheck {
  int N_small = 0;
  int N_large = 0;
  double fraction_small = 0;
  double fraction_large = 0;
  double margin = 0;  // 1.96 · pooled standard error
  bool holds = false;
};

struct LdtProbeReport {
  std::vector<LdtScaleReport> scales;
  std::vector<MonotonicityCheck> monotonicity;
  bool monotone() const;
};

/// f_large ≤ f_small + 1.96 √(f_s(1−f_s)/n_s + f_l(1−f_l)/n_l).
MonotonicityCheck compare_fractions(int N_small, double f_small, int n_small, int N_large, double f_large,
                                    int n_large);

/// Both LDT predicates on Λ_N(j₀) = (0, j₀) + [−N, N]^{b+d} for stratified σ samples.
LdtProbeReport ldt_probe(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega, double delta, int p,
                         const LdtOptions& opt);

struct NeumannReport {
  double norm = 0;  // ‖(A + B)⁻¹‖
  double norm_bound = 0;
  double entry_excess = 0;  // max |(A+B)⁻¹ − A⁻¹| / (ε₁⁻¹ e^{−c‖m−m'‖})
  double smallness = 0;     // 4|S|²(diam S + 1)^C ε₂/ε₁
  bool norm_holds = false;
  bool entry_holds = false;
  bool holds() const { return norm_holds && entry_holds; }
};

/// Checks every premise of the perturbation lemma on the instance, then both conclusions.
/// `points` gives (n, j) of each row; the lattice set S is their distinct values.
/// Throws HypothesisViolated naming each failed premise.
NeumannReport neumann_verify(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, const std::vector<IntVec>& points,
                             double eps1, double eps2, double c, double C);

struct BoxThresholds {
  double norm_bound = 0;  // 0 selects e^{N₀^{9/10}}
  double rate = 0.5;
  double decay_from = 0;  // 0 selects √N₀
};

struct BoxEntry {
  IntVec center;
  bool good = false;
  double inv_norm = 0;
  double decay_excess = 0;
};

struct BoxClassification {
  int N0 = 0;
  int N = 0;
  std::vector<BoxEntry> boxes;
  int good = 0;
  int bad = 0;
  int disjoint_bad = 0;
  double sublinear_bound = 0;  // N^{3/8} / N^{1/4}
  bool sublinear_holds = false;
};

/// Good/bad status of every size-N₀ box inside the operator's region, plus a greedy maximal
/// family of pairwise disjoint bad boxes. N is the outer scale for the sublinear bound.
BoxClassification classify_boxes(const RestrictedOperator& op, int N0, int N, const BoxThresholds& thr = {});

struct ResolventCheck {
  double max_defect = 0;
  double norm = 0;        // ‖G_Λ‖
  double norm_bound = 0;  // 4(2M₁+1)^{b+d} e^{M₁^{9/10}}
  bool norm_holds = false;
  bool cover_good = true;  // every sub-box passes the good-box predicate
  int M1 = 0;
  int pairs = 0;
};

/// For each point of Λ, a box of size M inside Λ containing it, as centered as Λ allows.
std::vector<Region> clamped_cover(const Region& lambda, int M);

/// Checks G_Λ = G_W + G_W Γ G_Λ on rows in W for each sub-box W of the cover, Γ = −T on
/// W × (Λ∖W). Each point must sit in some W at distance ≥ size/2 from Λ∖W, else CoverageGap.
ResolventCheck resolvent_reconstruct_check(const RestrictedOperator& op, const std::vector<Region>& cover,
                                           double rate = 0.5);

}  // namespace maryland
