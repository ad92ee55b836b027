#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "maryland/errors.hpp"
#include "maryland/spectrum.hpp"

using namespace maryland;

namespace {

MarylandParams line(double eps, double theta) {
  MarylandParams p;
  p.eps = eps;
  p.theta = theta;
  p.alpha = Eigen::VectorXd::Constant(1, golden_frequency());
  return p;
}

double cot_pi(double x) { return std::cos(std::numbers::pi * x) / std::sin(std::numbers::pi * x); }

// Real roots of a monic cubic by the trigonometric form, ascending.
std::vector<double> cubic_roots(double b, double c, double d) {
  const double p = c - b * b / 3, q = 2 * b * b * b / 27 - b * c / 3 + d;
  const double m = 2 * std::sqrt(-p / 3);
  const double phi = std::acos(3 * q / (p * m)) / 3;
  std::vector<double> r;
  for (int k = 0; k < 3; ++k) r.push_back(m * std::cos(phi - 2 * std::numbers::pi * k / 3) - b / 3);
  std::sort(r.begin(), r.end());
  return r;
}

}  // namespace

TEST_CASE("diophantine check") {
  CHECK(diophantine_check(Eigen::VectorXd::Constant(1, golden_frequency()), 0.2, 2.0, 50).holds);
  const auto third = diophantine_check(Eigen::VectorXd::Constant(1, 1.0 / 3.0), 1e-3, 2.0, 50);
  CHECK_FALSE(third.holds);
  CHECK(std::abs(third.witness(0)) == 3);
  CHECK(third.torus_distance < 1e-12);
  Eigen::VectorXd half(2);
  half << 0.5, 0.3819660112501051;
  CHECK_FALSE(diophantine_check(half, 1e-3, 3.0, 10).holds);
}

TEST_CASE("hamiltonian without hopping is diagonal cot") {
  const MarylandParams p = line(0.0, 0.3);
  const Eigen::MatrixXd H = build_hamiltonian(p, Region::box(1, 4));
  CHECK((H - Eigen::MatrixXd(H.diagonal().asDiagonal())).norm() == 0.0);
  for (int j = -4; j <= 4; ++j) CHECK(H(j + 4, j + 4) == doctest::Approx(cot_pi(0.3 + j * golden_frequency())).epsilon(1e-12));
}

TEST_CASE("three site hamiltonian against cubic roots") {
  const MarylandParams p = line(0.1, 0.3);
  const Eigen::MatrixXd H = build_hamiltonian(p, Region::box(1, 1));
  const double a = H(0, 0), b = H(1, 1), c = H(2, 2), e = 0.1;
  // det(λ − H) = λ³ − (a+b+c)λ² + (ab+bc+ca − 2e²)λ − (abc − e²(a+c))
  const auto roots = cubic_roots(-(a + b + c), a * b + b * c + c * a - 2 * e * e, -(a * b * c - e * e * (a + c)));
  Eigen::VectorXd mu = diagonalize_and_relabel(p, Region::box(1, 1)).mu;
  std::sort(mu.data(), mu.data() + 3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mu(k) - roots[static_cast<std::size_t>(k)]) < 1e-10);
}

TEST_CASE("pole in the box") {
  MarylandParams p = line(0.1, 0.0);
  CHECK_THROWS_AS(build_hamiltonian(p, Region::box(1, 2)), SingularPhase);
}

TEST_CASE("zero hopping eigensystem is the identity labelling") {
  const EigenSystem es = diagonalize_and_relabel(line(0.0, 0.3), Region::box(1, 6));
  for (Index s = 0; s < es.size(); ++s) {
    CHECK(std::abs(es.phi(s, s)) == 1.0);
    CHECK(es.mu(s) == doctest::Approx(cot_pi(0.3 + es.sites[static_cast<std::size_t>(s)](0) * golden_frequency())));
  }
}

TEST_CASE("localized eigenvectors") {
  const double eps = 0.05;
  const EigenSystem es = diagonalize_and_relabel(line(eps, 0.3), Region::box(1, 12));
  for (Index s = 0; s < es.size(); ++s) {
    CHECK(es.centers[static_cast<std::size_t>(s)] == es.sites[static_cast<std::size_t>(s)]);
    CHECK(std::abs(es.peak(s) - 1.0) < std::sqrt(eps));
  }
  for (Index s = 0; s < es.size(); ++s) {
    if (es.boundary_distance[static_cast<std::size_t>(s)] < 8) continue;
    for (Index x = 0; x < es.size(); ++x) {
      const int dist = l1_norm(es.sites[static_cast<std::size_t>(x)] - es.sites[static_cast<std::size_t>(s)]);
      if (dist == 0 || dist > 8) continue;
      CHECK(std::abs(es.phi(x, s)) < std::pow(eps, 0.5 * dist));
    }
  }
  const auto res = eigen_residuals(es);
  CHECK(res.max_residual < 1e-12);
  CHECK(res.orthogonality_defect < 1e-12);
}

TEST_CASE("eigenvalue profile") {
  const auto grid = midpoint_grid(200);
  const ProfileReport flat = eigenvalue_profile(line(0.0, 0.0), 10, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(flat.energy[k] == doctest::Approx(cot_pi(grid[k])).epsilon(1e-12));
  const ProfileReport r = eigenvalue_profile(line(0.05, 0.0), 15, grid);
  CHECK(r.max_potential_deviation <= 0.1);
  CHECK(r.monotone);
  const ProfileReport half = eigenvalue_profile(line(0.05, 0.0), 15, {0.5});
  CHECK(std::abs(half.energy[0]) < 1e-8);
}

TEST_CASE("reflection symmetry") {
  CHECK(check_symmetry(line(0.1, 0.5), Region::box(1, 10)).defect <= 1e-10);
  CHECK(check_symmetry(line(0.1, 0.3), Region::box(1, 10)).defect <= 1e-10);
  CHECK(check_symmetry(line(0.0, 0.3), Region::box(1, 10)).defect == 0.0);
  CHECK_THROWS_AS(check_symmetry(line(0.1, 0.3), Region::box(IntVec::Ones(1), 3)), AsymmetricBox);
}

TEST_CASE("translation covariance") {
  CHECK(check_translation_covariance(line(0.05, 0.3), 6, IntVec::Zero(1)) == 0.0);
  CHECK(check_translation_covariance(line(0.05, 0.3), 6, IntVec::Constant(1, 3)) <= 1e-10);
  MarylandParams p;
  p.d = 2;
  p.eps = 0.05;
  p.theta = 0.3;
  p.tau = 3;
  p.alpha = Eigen::Vector2d(std::sqrt(2.0) - 1, std::sqrt(3.0) - 1);
  CHECK(check_translation_covariance(p, 4, Eigen::Vector2i(1, -2)) <= 1e-10);
}

TEST_CASE("rellich iteration") {
  const auto grid = midpoint_grid(200);
  const RellichTrace flat = rellich_iterate(line(0.0, 0.0), grid, {1, 3, 9});
  for (std::size_t k = 1; k < flat.levels.size(); ++k) CHECK(flat.levels[k].sup_defect == 0.0);
  const RellichTrace t = rellich_iterate(line(0.05, 0.0), grid, {1, 3, 9});
  REQUIRE(t.levels.size() >= 3);
  CHECK(t.levels[1].sup_defect <= 0.1);
  CHECK(t.levels[2].sup_defect < t.levels[1].sup_defect);
}

TEST_CASE("center equidistribution") {
  const EigenSystem flat = diagonalize_and_relabel(line(0.0, 0.3), Region::box(1, 20));
  const auto f = center_equidistribution(flat, 5, 2);
  CHECK(f.min_ratio == 1.0);
  CHECK(f.max_ratio == 1.0);
  const EigenSystem es = diagonalize_and_relabel(line(0.05, 0.3), Region::box(1, 30));
  const auto r = center_equidistribution(es, 5, 4);
  CHECK(r.min_ratio >= 0.8);
  CHECK(r.max_ratio <= 1.2);
  MarylandParams p;
  p.d = 2;
  p.eps = 0.03;
  p.theta = 0.3;
  p.tau = 3;
  p.alpha = Eigen::Vector2d(std::sqrt(2.0) - 1, std::sqrt(3.0) - 1);
  const auto r2 = center_equidistribution(diagonalize_and_relabel(p, Region::box(2, 8)), 3, 2);
  CHECK(r2.min_ratio >= 0.49);
  CHECK(r2.max_ratio <= 1.69);
}
