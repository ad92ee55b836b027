#include "maryland/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace maryland {

Coeffs::Coeffs(int b, int d, int time_radius, int space_radius)
    : time_(b, time_radius), space_(d, space_radius), values_(CoeffMatrix::Zero(time_.size(), space_.size())) {}

Complex Coeffs::u(const IntVec& n, const IntVec& j) const {
  if (!contains(n, j)) return {0.0, 0.0};
  return values_(time_.encode(n), space_.encode(j));
}

void Coeffs::set(const IntVec& n, const IntVec& j, Complex value) {
  if (!contains(n, j)) throw std::out_of_range("mode outside the coefficient block");
  values_(time_.encode(n), space_.encode(j)) = value;
}

Coeffs Coeffs::resized(int time_radius, int space_radius) const {
  Coeffs out(b(), d(), time_radius, space_radius);
  for (Index t = 0; t < time_size(); ++t) {
    const IntVec n = time_.decode(t);
    if (!out.time_.contains(n)) continue;
    const Index tn = out.time_.encode(n);
    for (Index s = 0; s < space_size(); ++s) {
      const IntVec j = space_.decode(s);
      if (out.space_.contains(j)) out.values_(tn, out.space_.encode(j)) = values_(t, s);
    }
  }
  return out;
}

Coeffs Coeffs::conjugate_sector() const {
  Coeffs out(b(), d(), time_radius(), space_radius());
  // The time box is symmetric, so n ↦ −n reverses the slot order.
  const Index last = time_size() - 1;
  for (Index t = 0; t <= last; ++t) out.values_.row(t) = values_.row(last - t).conjugate();
  return out;
}

double Coeffs::tail_norm(int r) const {
  double acc = 0.0;
  for (Index t = 0; t < time_size(); ++t)
    if (linf_norm(time_.decode(t)) > r) acc += values_.row(t).squaredNorm();
  return std::sqrt(acc);
}

void ResonantSet::validate(int d, double a_min, double a_max) const {
  if (beta.empty()) throw std::invalid_argument("resonant set needs at least one anchor");
  if (beta.size() != a.size()) throw std::invalid_argument("anchor sites and amplitudes differ in length");
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (beta[k].size() != d) throw std::invalid_argument("anchor site has wrong dimension");
    if (!(a[k] >= a_min && a[k] <= a_max)) throw std::invalid_argument("anchor amplitude outside window");
    for (std::size_t m = 0; m < k; ++m)
      if (beta[m] == beta[k]) throw std::invalid_argument("anchor sites must be distinct");
  }
}

bool ResonantSet::contains(Sector s, const IntVec& n, const IntVec& j) const {
  const int sg = sector_sign(s);
  for (int k = 0; k < b(); ++k) {
    if (j != beta[static_cast<std::size_t>(k)]) continue;
    IntVec e = IntVec::Zero(n.size());
    e(k) = -sg;
    if (n == e) return true;
  }
  return false;
}

Coeffs ResonantSet::initial(int d, int time_radius, int space_radius) const {
  Coeffs u(b(), d, time_radius, space_radius);
  impose(u);
  return u;
}

void ResonantSet::impose(Coeffs& u) const {
  for (int k = 0; k < b(); ++k) u.set(-unit_vector(b(), k), beta[static_cast<std::size_t>(k)], a[static_cast<std::size_t>(k)]);
}

OverlapTensor::OverlapTensor(const EigenSystem& es, int p, double drop_tol) : es_(&es), p_(p), drop_tol_(drop_tol) {
  if (p < 1) throw std::invalid_argument("nonlinearity power p must be at least 1");
}

double OverlapTensor::value(Index j, Index jp, const std::vector<Index>& js, const std::vector<Index>& jps) const {
  if (static_cast<int>(js.size()) != p_ || static_cast<int>(jps.size()) != p_)
    throw std::invalid_argument("overlap needs p labels on each side");
  std::vector<Index> labels{j, jp};
  labels.insert(labels.end(), js.begin(), js.end());
  labels.insert(labels.end(), jps.begin(), jps.end());
  return value(labels);
}

double OverlapTensor::value(const std::vector<Index>& labels) const {
  if (static_cast<int>(labels.size()) != 2 * p_ + 2) throw std::invalid_argument("overlap needs 2p+2 labels");
  std::vector<Index> key = labels;
  std::sort(key.begin(), key.end());
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Eigen::VectorXd prod = es_->phi.col(key[0]);
  for (std::size_t i = 1; i < key.size(); ++i) prod.array() *= es_->phi.col(key[i]).array();
  const double v = prod.sum();
  if (std::abs(v) >= drop_tol_) {
    std::unique_lock lock(mutex_);
    cache_.emplace(std::move(key), v);
  }
  return v;
}

double OverlapTensor::diagonal(Index s) const { return value(std::vector<Index>(static_cast<std::size_t>(2 * p_ + 2), s)); }

std::size_t OverlapTensor::stored() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

}  // namespace maryland
