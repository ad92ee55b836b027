#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "maryland/resonance.hpp"

using namespace maryland;

namespace {

MarylandParams line(double eps, double theta, double alpha = golden_frequency()) {
  MarylandParams p;
  p.eps = eps;
  p.theta = theta;
  p.alpha = Eigen::VectorXd::Constant(1, alpha);
  return p;
}

double min_pair_gap(const EigenSystem& es, int N) {
  double best = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < es.size(); ++a)
    for (Index b = a + 1; b < es.size(); ++b)
      if (linf_norm(es.sites[static_cast<std::size_t>(a)]) <= N && linf_norm(es.sites[static_cast<std::size_t>(b)]) <= N)
        best = std::min(best, std::abs(es.mu(a) - es.mu(b)));
  return best;
}

const std::vector<IntVec> kOrigin{IntVec::Zero(1)};

}  // namespace

TEST_CASE("pair separation") {
  const EigenSystem flat = diagonalize_and_relabel(line(0.0, 0.3), Region::box(1, 15));
  const PredicateEntry e0 = check_pair_separation(flat, 10);
  CHECK(e0.value == doctest::Approx(min_pair_gap(flat, 10)).epsilon(1e-14));
  CHECK(e0.holds == (e0.value >= e0.threshold));

  const EigenSystem es = diagonalize_and_relabel(line(0.02, 0.3), Region::box(1, 15));
  CHECK(std::abs(check_pair_separation(es, 10).value - e0.value) <= 4 * 0.02);

  const EigenSystem third = diagonalize_and_relabel(line(0.0, 0.1, 1.0 / 3.0), Region::box(1, 6));
  const PredicateEntry bad = check_pair_separation(third, 4);
  CHECK_FALSE(bad.holds);
  CHECK(bad.value < 1e-12);
}

TEST_CASE("magnitude bounds") {
  const int N = 4;
  // θ + 2α lands next to ½, where cot vanishes
  const double theta = 0.5 - 2 * golden_frequency() + 2.0 + 1e-6;
  const PredicateEntry low = check_magnitude_bounds(diagonalize_and_relabel(line(0.0, theta), Region::box(1, 6)), N);
  CHECK_FALSE(low.lower_holds);
  CHECK(low.witness.front().second(0) == 2);

  const EigenSystem es = diagonalize_and_relabel(line(0.0, 0.3), Region::box(1, 10));
  const PredicateEntry a = check_magnitude_bounds(es, N);
  const PredicateEntry b = check_magnitude_bounds(es, 2 * N);
  CHECK(a.holds);
  CHECK(b.threshold < a.threshold);
  CHECK(b.upper_threshold > a.upper_threshold);
}

TEST_CASE("first melnikov") {
  const EigenSystem es = diagonalize_and_relabel(line(0.02, 0.3), Region::box(1, 8));
  const Eigen::VectorXd w0 = omega_zero(es, kOrigin);
  CHECK(w0(0) == es.eigenvalue(kOrigin[0]));
  const int R = 3;
  double brute = std::numeric_limits<double>::infinity();
  for (int n = -R; n <= R; ++n)
    for (int j = -R; j <= R; ++j) {
      if (n == -1 && j == 0) continue;
      brute = std::min(brute, std::abs(n * w0(0) + es.eigenvalue(IntVec::Constant(1, j))));
    }
  for (double delta : {1e-3, 1e-4}) {
    const PredicateEntry e = check_first_melnikov(es, w0, kOrigin, R, melnikov_threshold(delta));
    CHECK(e.value == doctest::Approx(brute).epsilon(1e-14));
    CHECK(e.holds == (e.value >= e.threshold));
  }
  CHECK(melnikov_threshold(1e-4) == doctest::Approx(0.632).epsilon(1e-3));
}

TEST_CASE("second melnikov exempt and trivial tuples") {
  const EigenSystem es = diagonalize_and_relabel(line(0.02, 0.3), Region::box(1, 8));
  const Eigen::VectorXd w0 = omega_zero(es, kOrigin);
  const PredicateEntry e = check_second_melnikov(es, w0, kOrigin, 2, 0.1);
  CHECK(e.trivial_degenerate > 0);
  CHECK_FALSE(e.holds);
  CHECK(e.value_excluding_trivial > 0.0);
  CHECK(e.holds_excluding_trivial == (e.value_excluding_trivial > e.threshold));
}

TEST_CASE("omega hypothesis thresholds move with K2") {
  const EigenSystem es = diagonalize_and_relabel(line(0.02, 0.3), Region::box(1, 10));
  const Eigen::VectorXd w = omega_zero(es, kOrigin).array() + 1e-3 * 0.7;
  double last = 0;
  for (double K2 : {1.0, 2.0, 4.0, 8.0}) {
    const auto entries = check_omega_hypotheses(es, w, 4, 2, K2);
    REQUIRE_FALSE(entries.empty());
    CHECK(entries.front().threshold >= last);
    last = entries.front().threshold;
    for (const auto& e : entries) CHECK(e.holds == (e.value >= e.threshold));
  }
}

TEST_CASE("tan derivatives") {
  const auto P = tan_derivative_polys(3);
  CHECK(P[0].size() == 1);
  CHECK(P[0](0) == 1.0);
  const double th = 0.137, h = 1e-5;
  const Eigen::VectorXd d = tan_pi_derivatives(th, 2);
  const double fd = (std::tan(std::numbers::pi * (th + h)) - std::tan(std::numbers::pi * (th - h))) / (2 * h);
  CHECK(d(0) == doctest::Approx(std::tan(std::numbers::pi * th)));
  CHECK(d(1) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("transversality") {
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(1, golden_frequency());
  std::vector<double> grid;
  for (int k = 0; k < 50; ++k) grid.push_back(0.013 + 0.0197 * k);
  const std::vector<IntVec> same{IntVec::Constant(1, 2), IntVec::Constant(1, 2)};
  const auto zero = transversality_scan(alpha, grid, Eigen::Vector2i(1, -1), same);
  CHECK(zero.min_abs_F == 0.0);
  for (const auto& s : zero.samples) CHECK(s.det_direct == doctest::Approx(0.0));

  const std::vector<IntVec> two{IntVec::Constant(1, -1), IntVec::Constant(1, 3)};
  CHECK(transversality_scan(alpha, grid, Eigen::Vector2i(1, -1), two).max_det_disagreement <= 1e-8);

  const std::vector<IntVec> three{IntVec::Constant(1, -2), IntVec::Constant(1, 0), IntVec::Constant(1, 1)};
  CHECK(transversality_scan(alpha, grid, Eigen::Vector3i(1, 2, -1), three).min_derivative_stack > 0.0);
}

TEST_CASE("theta monte carlo is seeded") {
  ThetaSweepOptions opt;
  opt.samples = 20;
  opt.box_radius = 8;
  const auto a = theta_monte_carlo(line(0.02, 0.0), kOrigin, 1e-3, opt, 9);
  const auto b = theta_monte_carlo(line(0.02, 0.0), kOrigin, 1e-3, opt, 9);
  CHECK(a.fraction_failed == b.fraction_failed);
  CHECK(a.fraction_failed >= 0.0);
  CHECK(a.fraction_failed <= 1.0);
}
