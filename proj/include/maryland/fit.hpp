#pragma once

#include <vector>

namespace maryland {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double rms = 0;
  int points = 0;
};

/// Ordinary least squares y ≈ intercept + slope·x. Needs at least two distinct x.
LineFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace maryland
