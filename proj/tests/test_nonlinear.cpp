#include <doctest.h>

#include <cmath>

#include "maryland/errors.hpp"
#include "maryland/nonlinear.hpp"
#include "oracles.hpp"

using namespace maryland;

namespace {

EigenSystem small_system(double eps, double theta, int radius) {
  MarylandParams p;
  p.eps = eps;
  p.theta = theta;
  p.alpha = Eigen::VectorXd::Constant(1, golden_frequency());
  return diagonalize_and_relabel(p, Region::box(1, radius));
}

double max_diff(const Coeffs& a, const Coeffs& b) {
  double m = 0;
  const int R = std::max(a.time_radius(), b.time_radius());
  for (int n = -R; n <= R; ++n)
    for (Index s = 0; s < a.space_size(); ++s) {
      const IntVec nn = IntVec::Constant(1, n), j = a.space_index().decode(s);
      m = std::max(m, std::abs(a.u(nn, j) - b.u(nn, j)));
    }
  return m;
}

const IntVec kMinusOne = IntVec::Constant(1, -1);

}  // namespace

TEST_CASE("zero field has zero nonlinearity") {
  const EigenSystem es = small_system(0.03, 0.3, 3);
  CHECK(nonlinear_term(Coeffs(1, 1, 1, 3), es, 1).norm() == 0.0);
}

TEST_CASE("single anchored mode") {
  const EigenSystem es = small_system(0.03, 0.3, 3);
  const OverlapTensor ot(es, 1, 0.0);
  const double a = 1.3;
  Coeffs u(1, 1, 1, 3);
  u.set(kMinusOne, IntVec::Zero(1), a);
  const Coeffs W = nonlinear_term(u, es, 1);
  const Index beta = es.slot(IntVec::Zero(1));
  for (Index t = 0; t < W.time_size(); ++t)
    for (Index s = 0; s < W.space_size(); ++s) {
      const int n = W.time_index().decode(t)(0);
      const double expect = n == -1 ? a * a * a * ot.value({s, beta, beta, beta}) : 0.0;
      CHECK(std::abs(W.values()(t, s) - expect) < 1e-13);
    }
}

TEST_CASE("random block against the brute force sum") {
  Rng rng(21);
  const EigenSystem es = small_system(0.05, 0.41, 1);
  const Coeffs u = oracle::random_coeffs(rng, 1, 1, 1, 1, 1.0);
  const Coeffs fast = nonlinear_term(u, es, 1);
  const Coeffs slow = oracle::brute_force_W(u, u.conjugate_sector(), es, 1);
  CHECK(max_diff(fast, slow) <= 1e-12 * std::max(1.0, slow.values().cwiseAbs().maxCoeff()));
}

TEST_CASE("sampled time domain agrees") {
  Rng rng(22);
  const EigenSystem es = small_system(0.04, 0.2, 3);
  const Coeffs u = oracle::random_coeffs(rng, 1, 1, 1, 3, 0.5);
  for (int p : {1, 2}) {
    const Coeffs W = nonlinear_term(u, es, p);
    Eigen::MatrixXcd uhat(3, es.size());
    for (int n = -1; n <= 1; ++n) uhat.row(n + 1) = u.values().row(n + 1);
    const Eigen::MatrixXcd ps = oracle::pseudo_spectral_W(uhat, 1, es, p, 64);
    for (int n = -1; n <= 1; ++n)
      for (Index s = 0; s < es.size(); ++s)
        CHECK(std::abs(ps(n + 1, s) - W.u(IntVec::Constant(1, n), es.sites[static_cast<std::size_t>(s)])) < 1e-12);
  }
}

TEST_CASE("overlap tensor symmetries") {
  const EigenSystem es = small_system(0.05, 0.3, 2);
  const OverlapTensor ot(es, 2);
  const double v = ot.value(0, 1, {2, 3}, {4, 1});
  CHECK(ot.value(0, 1, {3, 2}, {1, 4}) == v);
  CHECK(ot.value(1, 0, {2, 3}, {4, 1}) == v);
  CHECK(ot.diagonal(2) == doctest::Approx(es.phi.col(2).array().pow(6).sum()));
}

TEST_CASE("truncation policy") {
  const EigenSystem es = small_system(0.03, 0.3, 2);
  Coeffs u(1, 1, 1, 2);
  u.set(kMinusOne, IntVec::Zero(1), 1.0);
  u.set(IntVec::Constant(1, 1), IntVec::Zero(1), 0.1);
  CHECK_THROWS_AS(nonlinear_term(u, es, 1, 2, Truncation::fail), BlockTooSmall);
  const NonlinearResult r = nonlinear_term(u, es, 1, 1, Truncation::truncate);
  CHECK(r.W.time_radius() == 1);
  CHECK(r.tail_norm > 0.0);
  CHECK(nonlinear_term(u, es, 1, 3, Truncation::fail).tail_norm == 0.0);
}

TEST_CASE("operator with zero field is the shifted diagonal") {
  const EigenSystem es = small_system(0.03, 0.3, 2);
  const ModeList modes = enumerate_region(Region::box(2, 2), 1);
  const Eigen::VectorXd omega = Eigen::VectorXd::Constant(1, 0.37);
  const Eigen::MatrixXcd T = linearized_operator(Coeffs(1, 1, 1, 2), es, omega, 0.25, 1e-3, 1, modes);
  const Eigen::VectorXcd D = shifted_diagonal(modes, es, omega, 0.25);
  CHECK((T - Eigen::MatrixXcd(D.asDiagonal())).norm() == 0.0);
  const Index k = modes.find(Sector::minus, IntVec::Constant(1, 2), IntVec::Constant(1, 1));
  CHECK(D(k).real() == doctest::Approx(-(2 * 0.37 + 0.25) + es.eigenvalue(IntVec::Constant(1, 1))));
}

TEST_CASE("residual of the linear solution") {
  const EigenSystem es = small_system(0.03, 0.3, 3);
  ResonantSet S;
  S.beta = {IntVec::Zero(1)};
  S.a = {1.4};
  const Coeffs u0 = S.initial(1, 1, 3);
  const Residual r = residual(u0, es, Eigen::VectorXd::Constant(1, es.eigenvalue(S.beta[0])), 0.0, 1, S);
  CHECK(r.norm == 0.0);
}

TEST_CASE("sector symmetry of the residual") {
  Rng rng(23);
  const EigenSystem es = small_system(0.03, 0.3, 3);
  ResonantSet S;
  S.beta = {IntVec::Zero(1)};
  S.a = {1.4};
  const Coeffs u = oracle::random_coeffs(rng, 1, 1, 1, 3, 0.3);
  const Residual r = residual(u, es, Eigen::VectorXd::Constant(1, 0.8), 1e-2, 1, S);
  for (Index t = 0; t < r.plus.time_size(); ++t)
    for (Index s = 0; s < r.plus.space_size(); ++s) {
      const IntVec n = r.plus.time_index().decode(t), j = r.plus.space_index().decode(s);
      CHECK(std::abs(r.minus.u(n, j) - std::conj(r.plus.u(-n, j))) <= 1e-12);
    }
}

TEST_CASE("conjugate nonlinear term") {
  Rng rng(24);
  const EigenSystem es = small_system(0.03, 0.3, 2);
  const Coeffs u = oracle::random_coeffs(rng, 1, 1, 1, 2, 0.5);
  const Coeffs W = nonlinear_term(u, es, 1), Wt = conjugate_nonlinear_term(u, es, 1);
  const Coeffs swapped = nonlinear_term_uv(u.conjugate_sector(), u, es, 1);
  CHECK(max_diff(Wt, swapped) < 1e-13);
  CHECK(std::abs(Wt.u(IntVec::Constant(1, 2), IntVec::Zero(1)) - std::conj(W.u(IntVec::Constant(1, -2), IntVec::Zero(1)))) <
        1e-14);
}
