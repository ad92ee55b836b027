#pragma once

#include <vector>

#include <Eigen/Core>

#include "maryland/coeffs.hpp"

namespace maryland {

/// Σ_n F(n, x) e^{in·ωt} sampled on the box sites x, time modes in [−R, R]^b.
struct ModeField {
  BoxIndexer time;
  CoeffMatrix values;  // rows: time slots, columns: site slots

  int radius() const { return time.radius(); }
  /// Row of mode n, or an empty row pointer when n is outside the field.
  Index row(const IntVec& n) const { return time.contains(n) ? time.encode(n) : -1; }
};

/// U(n, x) = Σ_j c(n, j) φ_j(x).
ModeField to_field(const Coeffs& c, const EigenSystem& es);
/// Constant 1 at n = 0.
ModeField unit_field(int b, Index sites);
/// Convolution in n, pointwise in x.
ModeField multiply(const ModeField& a, const ModeField& b);
/// U^pu · V^pv.
ModeField power_product(const ModeField& U, const ModeField& V, int pu, int pv);
/// Σ_x φ_j(x) f(n, x) on the full support of f.
Coeffs project(const ModeField& f, const EigenSystem& es);

/// W(u, v)(n, j) = Σ_x φ_j(x)[U^{p+1} V^p]_n(x) with u, v independent; full support.
Coeffs nonlinear_term_uv(const Coeffs& u, const Coeffs& v, const EigenSystem& es, int p);
/// W_u with v the implied conjugate sector.
Coeffs nonlinear_term(const Coeffs& u, const EigenSystem& es, int p);
/// W̃_u(n, j) = conj(W_u(−n, j)).
Coeffs conjugate_nonlinear_term(const Coeffs& u, const EigenSystem& es, int p);

enum class Truncation { fail, truncate };

struct NonlinearResult {
  Coeffs W;
  double tail_norm = 0;  // ℓ² mass of W_u outside the target block
};

/// W_u restricted to time radius `target`. Throws BlockTooSmall under Truncation::fail
/// when the target cannot hold (2p+1) times the time radius of u.
NonlinearResult nonlinear_term(const Coeffs& u, const EigenSystem& es, int p, int target, Truncation policy);

/// Multiplier fields of the four blocks of 𝒲:
/// ++ (p+1)U^pV^p, +− pU^{p+1}V^{p−1}, −+ pV^{p+1}U^{p−1}, −− (p+1)V^pU^p.
struct LinearizationFields {
  int p = 1;
  ModeField pp, pm, mp, mm;
  const ModeField& block(Sector r, Sector rp) const;
};

LinearizationFields linearization_fields(const Coeffs& u, const Coeffs& v, const EigenSystem& es, int p);

/// max |G^{−−}_k − conj G^{++}_{−k}|, |G^{−+}_k − conj G^{+−}_{−k}|, relative to the field scale.
double conjugation_defect(const LinearizationFields& f);

/// 𝒲 on the modes: entry (r,n,j; r',n',j') = Σ_x φ_j(x) φ_j'(x) G^{rr'}_{n−n'}(x).
Eigen::MatrixXcd coupling_matrix(const LinearizationFields& f, const EigenSystem& es, const ModeList& modes);

/// D(σ): ±(n·ω + σ) + μ_j per sector.
Eigen::VectorXcd shifted_diagonal(const ModeList& modes, const EigenSystem& es, const Eigen::VectorXd& omega,
                                  double sigma);

/// T(σ) = D(σ) + δ𝒲_u on the modes, v the implied conjugate sector. The conjugation
/// relations between the blocks are checked and a violation throws std::logic_error.
Eigen::MatrixXcd linearized_operator(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega,
                                     double sigma, double delta, int p, const ModeList& modes);
/// Same with u, v independent.
Eigen::MatrixXcd linearized_operator_uv(const Coeffs& u, const Coeffs& v, const EigenSystem& es,
                                        const Eigen::VectorXd& omega, double sigma, double delta, int p,
                                        const ModeList& modes);

struct Residual {
  Coeffs plus;   // F⁺ = (n·ω + μ_j)û + δW_u
  Coeffs minus;  // F⁻ = (−n·ω + μ_j)v + δW̃_u
  double norm = 0;  // ℓ² over both sectors off S, full support
  double tail = 0;  // part of `norm` outside the time block of u
};

/// Both sectors of F on the full support of W_u, zeroed on the resonant set.
Residual residual(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega, double delta, int p,
                  const ResonantSet& S);

/// Space block of coefficients must coincide with the eigensystem box.
void require_compatible(const Coeffs& c, const EigenSystem& es);

}  // namespace maryland
