#include "maryland/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "maryland/errors.hpp"

namespace maryland {

int l1_norm(const IntVec& v) { return v.cwiseAbs().sum(); }

int linf_norm(const IntVec& v) { return v.size() == 0 ? 0 : v.cwiseAbs().maxCoeff(); }

double torus_norm(double x) { return std::abs(x - std::nearbyint(x)); }

long double torus_norm(long double x) { return std::fabs(x - std::nearbyintl(x)); }

bool lex_less(const IntVec& a, const IntVec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

IntVec unit_vector(int dim, int k) {
  IntVec e = IntVec::Zero(dim);
  e(k) = 1;
  return e;
}

IntVec ModeIndex::point() const {
  IntVec p(n.size() + j.size());
  p << n, j;
  return p;
}

BoxIndexer::BoxIndexer(int dim, int radius) : BoxIndexer(dim, radius, IntVec::Zero(dim)) {}

BoxIndexer::BoxIndexer(int dim, int radius, IntVec center)
    : dim_(dim), radius_(radius), center_(std::move(center)) {
  if (radius < 0) throw std::invalid_argument("negative box radius");
  size_ = 1;
  for (int k = 0; k < dim_; ++k) size_ *= 2 * radius_ + 1;
}

bool BoxIndexer::contains(const IntVec& p) const {
  if (p.size() != dim_) return false;
  return ((p - center_).cwiseAbs().array() <= radius_).all();
}

Index BoxIndexer::encode(const IntVec& p) const {
  assert(contains(p));
  Index k = 0;
  const Index side = 2 * radius_ + 1;
  for (int c = 0; c < dim_; ++c) k = k * side + (p(c) - center_(c) + radius_);
  return k;
}

IntVec BoxIndexer::decode(Index k) const {
  IntVec p(dim_);
  const Index side = 2 * radius_ + 1;
  for (int c = dim_ - 1; c >= 0; --c) {
    p(c) = static_cast<int>(k % side) - radius_ + center_(c);
    k /= side;
  }
  return p;
}

Region Region::box(IntVec center, int size) {
  Region r;
  r.kind = RegionKind::full_box;
  r.center = std::move(center);
  r.size = size;
  return r;
}

Region Region::corner(IntVec center, int size, std::vector<Cut> cuts) {
  if (static_cast<int>(cuts.size()) != center.size()) throw std::invalid_argument("cut pattern length mismatch");
  const auto constrained = std::count_if(cuts.begin(), cuts.end(), [](Cut c) { return c != Cut::none; });
  if (constrained < 2) throw std::invalid_argument("corner cut needs at least two constrained coordinates");
  Region r;
  r.kind = RegionKind::corner_cut;
  r.center = std::move(center);
  r.size = size;
  r.cuts = std::move(cuts);
  return r;
}

Region Region::generalized(IntVec center, IntVec half_widths, IntVec translate) {
  if (half_widths.size() != center.size() || translate.size() != center.size())
    throw std::invalid_argument("generalized region dimension mismatch");
  if ((half_widths.array() < 0).any()) throw std::invalid_argument("negative half width");
  Region r;
  r.kind = RegionKind::generalized;
  r.center = std::move(center);
  r.half_widths = std::move(half_widths);
  r.translate = std::move(translate);
  r.size = r.half_widths.maxCoeff();
  return r;
}

bool Region::contains(const IntVec& p) const {
  if (p.size() != center.size()) return false;
  const IntVec rel = p - center;
  switch (kind) {
    case RegionKind::full_box:
      return (rel.cwiseAbs().array() <= size).all();
    case RegionKind::corner_cut: {
      if (!(rel.cwiseAbs().array() <= size).all()) return false;
      for (int k = 0; k < rel.size(); ++k) {
        const Cut c = cuts[static_cast<std::size_t>(k)];
        if (c == Cut::less && !(rel(k) < 0)) return true;
        if (c == Cut::greater && !(rel(k) > 0)) return true;
      }
      return false;  // inside the removed corner
    }
    case RegionKind::generalized: {
      if (!(rel.cwiseAbs().array() <= half_widths.array()).all()) return false;
      const IntVec shifted = rel - translate;
      return !(shifted.cwiseAbs().array() <= half_widths.array()).all();
    }
  }
  return false;
}

IntVec Region::lower() const {
  if (kind == RegionKind::generalized) return center - half_widths;
  return center.array() - size;
}

IntVec Region::upper() const {
  if (kind == RegionKind::generalized) return center + half_widths;
  return center.array() + size;
}

long long Region::bounding_volume() const {
  const IntVec ext = upper() - lower();
  long long v = 1;
  for (int k = 0; k < ext.size(); ++k) {
    v *= static_cast<long long>(ext(k)) + 1;
    if (v > std::numeric_limits<long long>::max() / 1024) return std::numeric_limits<long long>::max() / 1024;
  }
  return v;
}

Region Region::translated(const IntVec& shift) const {
  Region r = *this;
  r.center += shift;
  return r;
}

namespace {

// Visit every point of the bounding box [lo, hi] in lexicographic order.
template <typename F>
void for_each_in_box(const IntVec& lo, const IntVec& hi, F&& f) {
  const int dim = static_cast<int>(lo.size());
  if ((hi.array() < lo.array()).any()) return;
  IntVec p = lo;
  while (true) {
    f(p);
    int k = dim - 1;
    while (k >= 0 && p(k) == hi(k)) {
      p(k) = lo(k);
      --k;
    }
    if (k < 0) break;
    ++p(k);
  }
}

}  // namespace

std::vector<IntVec> enumerate_points(const Region& region, long long cap) {
  const long long volume = region.bounding_volume();
  if (volume > cap) throw RegionTooLarge(volume, cap);
  std::vector<IntVec> pts;
  pts.reserve(static_cast<std::size_t>(volume));
  for_each_in_box(region.lower(), region.upper(), [&](const IntVec& p) {
    if (region.contains(p)) pts.push_back(p);
  });
  return pts;
}

ModeList::ModeList(std::vector<ModeIndex> modes, int b, int d) : modes_(std::move(modes)), b_(b), d_(d) {
  std::stable_sort(modes_.begin(), modes_.end(), [](const ModeIndex& x, const ModeIndex& y) {
    if (x.sign != y.sign) return x.sign < y.sign;
    return lex_less(x.point(), y.point());
  });
  const int dim = b + d;
  lo_ = IntVec::Zero(dim);
  extent_ = IntVec::Ones(dim);
  if (modes_.empty()) return;
  IntVec lo = modes_.front().point();
  IntVec hi = lo;
  for (const auto& m : modes_) {
    const IntVec p = m.point();
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  lo_ = lo;
  extent_ = (hi - lo).array() + 1;
  long long vol = 2;
  for (int k = 0; k < dim; ++k) vol *= extent_(k);
  table_.assign(static_cast<std::size_t>(vol), -1);
  for (Index idx = 0; idx < size(); ++idx) {
    const auto& m = modes_[static_cast<std::size_t>(idx)];
    const IntVec p = m.point() - lo_;
    Index key = static_cast<int>(m.sign);
    for (int k = 0; k < dim; ++k) key = key * extent_(k) + p(k);
    if (table_[static_cast<std::size_t>(key)] != -1) throw std::invalid_argument("duplicate mode in ModeList");
    table_[static_cast<std::size_t>(key)] = idx;
  }
}

Index ModeList::find(Sector s, const IntVec& n, const IntVec& j) const {
  if (table_.empty() || n.size() != b_ || j.size() != d_) return -1;
  Index key = static_cast<int>(s);
  for (int k = 0; k < b_ + d_; ++k) {
    const int c = (k < b_ ? n(k) : j(k - b_)) - lo_(k);
    if (c < 0 || c >= extent_(k)) return -1;
    key = key * extent_(k) + c;
  }
  return table_[static_cast<std::size_t>(key)];
}

std::pair<Index, Index> ModeList::sector_range(Sector s) const {
  const auto first = std::find_if(modes_.begin(), modes_.end(), [s](const ModeIndex& m) { return m.sign == s; });
  auto last = first;
  while (last != modes_.end() && last->sign == s) ++last;
  return {first - modes_.begin(), last - modes_.begin()};
}

ModeList enumerate_region(const Region& region, int b, bool both_sectors, long long cap) {
  const int d = region.dim() - b;
  if (b < 1 || d < 1) throw std::invalid_argument("region dimension must be b + d with b, d >= 1");
  const long long per_sector = region.bounding_volume();
  const long long total = per_sector * (both_sectors ? 2 : 1);
  if (total > cap) throw RegionTooLarge(total, cap);
  const auto pts = enumerate_points(region, cap);
  std::vector<ModeIndex> modes;
  modes.reserve(pts.size() * (both_sectors ? 2 : 1));
  for (Sector s : {Sector::plus, Sector::minus}) {
    if (s == Sector::minus && !both_sectors) break;
    for (const auto& p : pts) modes.push_back({s, p.head(b), p.tail(d)});
  }
  return ModeList(std::move(modes), b, d);
}

long long elementary_cut_count(int dim) {
  long long count = 0;
  long long patterns = 1;
  for (int k = 0; k < dim; ++k) patterns *= 3;
  for (long long code = 0; code < patterns; ++code) {
    long long c = code;
    int constrained = 0;
    for (int k = 0; k < dim; ++k, c /= 3)
      if (c % 3 != 0) ++constrained;
    if (constrained >= 2) ++count;
  }
  return count;
}

std::vector<Region> elementary_region_family(int dim, int size) {
  if (size < 1) throw std::invalid_argument("elementary region size must be >= 1");
  std::vector<Region> family{Region::box(dim, size)};
  long long patterns = 1;
  for (int k = 0; k < dim; ++k) patterns *= 3;
  for (long long code = 0; code < patterns; ++code) {
    std::vector<Cut> cuts(static_cast<std::size_t>(dim));
    long long c = code;
    int constrained = 0;
    // most significant digit first so the enumeration is lexicographic in the pattern
    for (int k = dim - 1; k >= 0; --k, c /= 3) {
      cuts[static_cast<std::size_t>(k)] = static_cast<Cut>(c % 3);
      if (c % 3 != 0) ++constrained;
    }
    if (constrained >= 2) family.push_back(Region::corner(IntVec::Zero(dim), size, std::move(cuts)));
  }
  return family;
}

int region_diameter(const Region& region) {
  const auto pts = enumerate_points(region);
  if (pts.empty()) return 0;
  IntVec lo = pts.front(), hi = pts.front();
  for (const auto& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).maxCoeff();
}

double linf_distance(const IntVec& p, const std::vector<IntVec>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) best = std::min(best, static_cast<double>(linf_norm(p - q)));
  return best;
}

int region_width(const Region& region, int max_width) {
  const auto pts = enumerate_points(region);
  if (pts.empty()) return 0;
  const int dim = region.dim();

  auto fits = [&](int M) {
    const auto family = elementary_region_family(dim, M);
    for (const auto& n : pts) {
      bool found = false;
      for (const auto& shape : family) {
        const auto shape_pts = enumerate_points(shape);
        for (const auto& offset : shape_pts) {
          const Region candidate = shape.translated(n - offset);
          bool inside = true;
          for (const auto& q : shape_pts)
            if (!region.contains(q + n - offset)) {
              inside = false;
              break;
            }
          if (!inside) continue;
          double dist = std::numeric_limits<double>::infinity();
          for (const auto& q : pts)
            if (!candidate.contains(q)) dist = std::min(dist, static_cast<double>(linf_norm(n - q)));
          if (dist >= M / 2.0) {
            found = true;
            break;
          }
        }
        if (found) break;
      }
      if (!found) return false;
    }
    return true;
  };

  for (int M = max_width; M >= 1; --M)
    if (fits(M)) return M;
  return 0;
}

}  // namespace maryland
