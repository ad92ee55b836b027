#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace maryland {

using Index = Eigen::Index;
using IntVec = Eigen::VectorXi;

/// Default cap on the number of modes a region may expand to.
inline constexpr long long kDefaultModeCap = 2'000'000;

int l1_norm(const IntVec& v);
int linf_norm(const IntVec& v);

/// Distance from x to the nearest integer, in [0, 1/2].
double torus_norm(double x);
long double torus_norm(long double x);

/// Lexicographic comparison of two equal-length integer vectors.
bool lex_less(const IntVec& a, const IntVec& b);

IntVec unit_vector(int dim, int k);

enum class Sector : int { plus = 0, minus = 1 };

inline int sector_sign(Sector s) { return s == Sector::plus ? 1 : -1; }

/// A mode (±, n, j) of the two-sector lattice {±} × Z^b × Z^d.
struct ModeIndex {
  Sector sign = Sector::plus;
  IntVec n;
  IntVec j;

  IntVec point() const;
  bool operator==(const ModeIndex& o) const { return sign == o.sign && n == o.n && j == o.j; }
};

/// Dense mixed-radix index over center + [-radius, radius]^dim, first coordinate most significant.
class BoxIndexer {
 public:
  BoxIndexer() = default;
  BoxIndexer(int dim, int radius);
  BoxIndexer(int dim, int radius, IntVec center);

  int dim() const { return dim_; }
  int radius() const { return radius_; }
  const IntVec& center() const { return center_; }
  Index size() const { return size_; }

  bool contains(const IntVec& p) const;
  Index encode(const IntVec& p) const;
  IntVec decode(Index k) const;

 private:
  int dim_ = 0;
  int radius_ = 0;
  IntVec center_;
  Index size_ = 1;
};

enum class RegionKind { full_box, corner_cut, generalized };
enum class Cut : signed char { none = 0, less = 1, greater = 2 };

/// Subset of Z^dim: a box of size N, a box with a sign-pattern corner removed,
/// or a rectangle minus one of its translates. Membership is computed from the
/// definition, no point sets are stored.
struct Region {
  RegionKind kind = RegionKind::full_box;
  IntVec center;
  int size = 0;
  std::vector<Cut> cuts;  // corner_cut only
  IntVec half_widths;     // generalized only
  IntVec translate;       // generalized only

  static Region box(IntVec center, int size);
  static Region box(int dim, int size) { return box(IntVec::Zero(dim), size); }
  static Region corner(IntVec center, int size, std::vector<Cut> cuts);
  static Region generalized(IntVec center, IntVec half_widths, IntVec translate);

  int dim() const { return static_cast<int>(center.size()); }
  bool contains(const IntVec& p) const;
  IntVec lower() const;
  IntVec upper() const;
  long long bounding_volume() const;
  Region translated(const IntVec& shift) const;
  bool is_symmetric_box() const { return kind == RegionKind::full_box && center.isZero(); }
};

/// Points of the region in lexicographic order.
std::vector<IntVec> enumerate_points(const Region& region, long long cap = kDefaultModeCap);

/// Ordered collection of modes with O(1) lookup of the flat index.
/// Ordering is sign-major, then lexicographic in (n, j).
class ModeList {
 public:
  ModeList() = default;
  ModeList(std::vector<ModeIndex> modes, int b, int d);

  Index size() const { return static_cast<Index>(modes_.size()); }
  const ModeIndex& operator[](Index k) const { return modes_[static_cast<std::size_t>(k)]; }
  const std::vector<ModeIndex>& modes() const { return modes_; }
  int b() const { return b_; }
  int d() const { return d_; }

  /// Flat index of the mode or -1.
  Index find(Sector s, const IntVec& n, const IntVec& j) const;
  Index find(const ModeIndex& m) const { return find(m.sign, m.n, m.j); }

  /// Index range [begin, end) occupied by one sector.
  std::pair<Index, Index> sector_range(Sector s) const;

 private:
  std::vector<ModeIndex> modes_;
  int b_ = 0;
  int d_ = 0;
  IntVec lo_;
  IntVec extent_;
  std::vector<Index> table_;
};

/// Modes of a region in Z^{b+d} (first b coordinates are n).
ModeList enumerate_region(const Region& region, int b, bool both_sectors = true,
                          long long cap = kDefaultModeCap);

/// The full box plus every cut with at least two constrained coordinates, centered at 0.
std::vector<Region> elementary_region_family(int dim, int size);

/// Count of sign patterns in {<,>,∅}^dim with at least two constrained coordinates.
long long elementary_cut_count(int dim);

/// sup of the ℓ∞ distance between two points of the region.
int region_diameter(const Region& region);

/// Largest M ≤ max_width such that every point sits in some translate of a size-M
/// elementary region inside the region, at ℓ∞ distance ≥ M/2 from the rest.
int region_width(const Region& region, int max_width);

/// ℓ∞ distance from a point to a finite set (infinity for the empty set).
double linf_distance(const IntVec& p, const std::vector<IntVec>& set);

}  // namespace maryland
