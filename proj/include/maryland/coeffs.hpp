#pragma once

#include <complex>
#include <map>
#include <shared_mutex>
#include <vector>

#include <Eigen/Core>

#include "maryland/lattice.hpp"
#include "maryland/spectrum.hpp"

namespace maryland {

using Complex = std::complex<double>;
using CoeffMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Complex amplitudes û(n, j) on [−Nt, Nt]^b × [−Ns, Ns]^d. Row = time slot, column = space
/// slot, so the flat index is tn·space_size + ts. The conjugate sector is never stored.
class Coeffs {
 public:
  Coeffs() = default;
  Coeffs(int b, int d, int time_radius, int space_radius);

  int b() const { return time_.dim(); }
  int d() const { return space_.dim(); }
  int time_radius() const { return time_.radius(); }
  int space_radius() const { return space_.radius(); }
  Index time_size() const { return time_.size(); }
  Index space_size() const { return space_.size(); }
  Index size() const { return time_size() * space_size(); }
  const BoxIndexer& time_index() const { return time_; }
  const BoxIndexer& space_index() const { return space_; }

  CoeffMatrix& values() { return values_; }
  const CoeffMatrix& values() const { return values_; }

  bool contains(const IntVec& n, const IntVec& j) const { return time_.contains(n) && space_.contains(j); }
  /// û(n, j), zero outside the block.
  Complex u(const IntVec& n, const IntVec& j) const;
  /// v(n, j) = conj(û(−n, j)).
  Complex v(const IntVec& n, const IntVec& j) const { return std::conj(u(-n, j)); }
  void set(const IntVec& n, const IntVec& j, Complex value);

  /// Copy onto a different block; entries outside the new block are dropped.
  Coeffs resized(int time_radius, int space_radius) const;
  /// Stored values of the implied conjugate sector, v(n, j) = conj(û(−n, j)).
  Coeffs conjugate_sector() const;

  double norm() const { return values_.norm(); }
  /// ℓ² mass outside the time radius r.
  double tail_norm(int r) const;

 private:
  BoxIndexer time_;
  BoxIndexer space_;
  CoeffMatrix values_;
};

/// Anchored modes u(−e_k, β_k) = a_k.
struct ResonantSet {
  std::vector<IntVec> beta;
  std::vector<double> a;

  int b() const { return static_cast<int>(beta.size()); }
  /// Distinct sites, matching lengths, amplitudes in [a_min, a_max].
  void validate(int d, double a_min = 1.0, double a_max = 2.0) const;
  /// Whether (sign, n, j) is one of the 2b modes (+, −e_k, β_k), (−, e_k, β_k).
  bool contains(Sector s, const IntVec& n, const IntVec& j) const;
  /// u⁽⁰⁾: anchors only.
  Coeffs initial(int d, int time_radius, int space_radius) const;
  /// Overwrite the anchor entries of u.
  void impose(Coeffs& u) const;
};

/// Σ_x Π_i φ_{s_i}(x) over 2p+2 labels, memoized by the sorted label tuple. Entries below
/// the drop tolerance are returned but not stored. Safe for concurrent use.
class OverlapTensor {
 public:
  OverlapTensor(const EigenSystem& es, int p, double drop_tol = 1e-14);

  int p() const { return p_; }
  /// Labels as slots of the eigensystem: j, j', then j₁…j_p, then j'₁…j'_p.
  double value(Index j, Index jp, const std::vector<Index>& js, const std::vector<Index>& jps) const;
  double value(const std::vector<Index>& labels) const;
  /// A = Σ_x |φ_s(x)|^{2p+2}.
  double diagonal(Index s) const;
  std::size_t stored() const;

 private:
  const EigenSystem* es_;
  int p_;
  double drop_tol_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::vector<Index>, double> cache_;
};

}  // namespace maryland
