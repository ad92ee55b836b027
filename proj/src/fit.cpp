#include "maryland/fit.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace maryland {

LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit inputs differ in length");
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 2) throw std::invalid_argument("fit needs two points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  LineFit f;
  f.intercept = c(0);
  f.slope = c(1);
  f.points = static_cast<int>(n);
  f.rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(n));
  return f;
}

}  // namespace maryland
