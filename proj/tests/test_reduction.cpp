#include <cmath>
#include <complex>

#include "doctest.h"
#include "orbitlab/reduction.hpp"
#include "orbitlab/rng.hpp"

using namespace orbitlab;

namespace {

Eigen::VectorXcd single_w(std::complex<double> v) {
  Eigen::VectorXcd w(1);
  w(0) = v;
  return w;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

}  // namespace

TEST_CASE("momentum map equals the x-gradient") {
  const auto P = make_projective_model(2, 1);
  Eigen::VectorXd x(2);
  x << 0.4, -0.9;
  const Eigen::VectorXcd w = single_w({0.3, 0.1});
  const Eigen::VectorXd p = reduction::momentum_map(*P, x, w);
  CHECK((p - P->eval_bundle(x, w).grad_x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("momentum map is strictly increasing along x for k = 1") {
  const auto P = make_projective_model(1, 1);
  const Eigen::VectorXcd w = single_w({0.5, -0.2});
  double prev = -1.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = -4.0 + 8.0 * i / 40.0;
    const double p = reduction::momentum_map(*P, scalar(x), w)(0);
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("reduced form at the pinned spot value") {
  const auto P = make_projective_model(1, 1);
  const auto rf = reduction::reduced_form(*P, scalar(1.0), single_w(0.0));
  CHECK(rf.sigma(0, 0).real() == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(std::abs(rf.sigma(0, 0).imag()) < 1e-12);
  CHECK(rf.sigma_m == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("reduced form matches the closed form on a sweep") {
  const auto P = make_projective_model(1, 1);
  for (const double q : {0.3, 0.9, 1.5}) {
    for (const std::complex<double> wv : {std::complex<double>(0.0, 0.0),
                                          std::complex<double>(-0.4, 0.7)}) {
      const auto rf = reduction::reduced_form(*P, scalar(q), single_w(wv));
      const double t = 1.0 + std::norm(wv);
      const double expected = (1.0 - q / 2) / (t * t);
      CHECK(rf.sigma(0, 0).real() == doctest::Approx(expected).epsilon(1e-8));
      CHECK(rf.sigma_m == doctest::Approx(-expected).epsilon(1e-8));
    }
  }
}

TEST_CASE("reduced form of the quadratic family is the identity") {
  const auto Q =
      make_quadratic_separable(1, 2, Eigen::MatrixXd::Identity(1, 1));
  Eigen::VectorXcd w(2);
  w << std::complex<double>(0.2, 0.1), std::complex<double>(-0.3, 0.4);
  const auto rf = reduction::reduced_form(*Q, scalar(0.5), w);
  CHECK((rf.sigma - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-10);
  CHECK(rf.sigma_m == doctest::Approx(1.0).epsilon(1e-10));  // det(-I_2)
}

TEST_CASE("sigma is Hermitian positive definite at interior momenta") {
  const auto P = make_projective_model(2, 2);
  Eigen::VectorXd q = reduction::momentum_map(
      *P, (Eigen::VectorXd(2) << 0.3, -0.5).finished(),
      (Eigen::VectorXcd(2) << std::complex<double>(0.4, 0.2),
       std::complex<double>(-0.1, 0.3))
          .finished());
  const auto rf = reduction::reduced_form(
      *P, q,
      (Eigen::VectorXcd(2) << std::complex<double>(0.4, 0.2),
       std::complex<double>(-0.1, 0.3))
          .finished());
  CHECK((rf.sigma - rf.sigma.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rf.sigma);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
  // (-1)^m sigma_m = det sigma > 0
  CHECK(rf.sigma_m > 0.0);  // m = 2
}

TEST_CASE("three-way factorization agreement for the quadratic family") {
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.5, 0.5, 1.0;
  const auto Q = make_quadratic_separable(2, 1, A);
  Eigen::VectorXd x(2);
  x << 0.7, -0.3;
  const auto rep =
      reduction::verify_factorization(*Q, x, single_w({0.4, -0.6}), 1e-10);
  CHECK(rep.pass);
  CHECK(rep.lhs == doctest::Approx(1.75).epsilon(1e-12));  // det A
  CHECK(rep.rhs == doctest::Approx(rep.lhs).epsilon(1e-12));
  CHECK(rep.schur == doctest::Approx(rep.lhs).epsilon(1e-12));
}

TEST_CASE("three-way factorization agreement for the projective model") {
  Rng rng(42);
  for (const auto& [k, m] : std::vector<std::pair<int, int>>{
           {1, 1}, {1, 2}, {2, 1}, {2, 2}}) {
    const auto P = make_projective_model(k, m);
    for (int rep_i = 0; rep_i < 5; ++rep_i) {
      Eigen::VectorXd x(k);
      for (int a = 0; a < k; ++a) x(a) = rng.uniform(-2.0, 2.0);
      Eigen::VectorXcd w(m);
      for (int j = 0; j < m; ++j)
        w(j) = std::complex<double>(rng.uniform(-1.0, 1.0),
                                    rng.uniform(-1.0, 1.0));
      const auto rep = reduction::verify_factorization(*P, x, w, 1e-8);
      CHECK(rep.pass);
      CHECK(rep.rel_err_lhs_rhs < 1e-8);
      CHECK(rep.rel_err_lhs_schur < 1e-8);
      CHECK(rep.rel_err_rhs_schur < 1e-8);
    }
  }
}

TEST_CASE("factorization spot value at the projective base point") {
  const auto P = make_projective_model(1, 1);
  const auto rep = reduction::verify_factorization(
      *P, Eigen::VectorXd::Zero(1), single_w(0.0), 1e-10);
  CHECK(rep.lhs == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(rep.pass);
}

TEST_CASE("factorization rejects nonpositive tolerances") {
  const auto P = make_projective_model(1, 1);
  CHECK_THROWS_AS(reduction::verify_factorization(*P, Eigen::VectorXd::Zero(1),
                                                  single_w(0.0), 0.0),
                  InvalidSpecError);
}

TEST_CASE("minor expansion crosscheck on the quadratic family") {
  const auto Q =
      make_quadratic_separable(2, 2, Eigen::MatrixXd::Identity(2, 2));
  Eigen::VectorXd x(2);
  x << 0.4, -0.2;
  Eigen::VectorXcd w(2);
  w << std::complex<double>(0.3, 0.1), std::complex<double>(0.0, -0.5);
  const auto rep = reduction::minor_expansion_crosscheck(*Q, x, w);
  // B = 0 for the separable family, so the expansion collapses to det(C) = 1
  CHECK(std::abs(rep.expansion - std::complex<double>(1.0, 0.0)) < 1e-12);
  CHECK(rep.direct == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.discrepancy < 1e-10);
}

TEST_CASE("minor expansion crosscheck on the projective model") {
  Rng rng(99);
  for (const auto& [k, m] : std::vector<std::pair<int, int>>{
           {1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 3}}) {
    const auto P = make_projective_model(k, m);
    Eigen::VectorXd x(k);
    for (int a = 0; a < k; ++a) x(a) = rng.uniform(-1.5, 1.5);
    Eigen::VectorXcd w(m);
    for (int j = 0; j < m; ++j)
      w(j) = std::complex<double>(rng.uniform(-0.8, 0.8),
                                  rng.uniform(-0.8, 0.8));
    const auto rep = reduction::minor_expansion_crosscheck(*P, x, w);
    CHECK(rep.discrepancy < 1e-9);
  }
}

TEST_CASE("minor expansion guards large dimensions") {
  const auto P4 = make_projective_model(4, 1);
  CHECK_THROWS_AS(
      reduction::minor_expansion_crosscheck(
          *P4, Eigen::VectorXd::Zero(4), single_w(0.0)),
      DimensionGuardError);
  const auto Pm4 = make_projective_model(1, 4);
  Eigen::VectorXcd w4 = Eigen::VectorXcd::Zero(4);
  CHECK_THROWS_AS(reduction::minor_expansion_crosscheck(
                      *Pm4, Eigen::VectorXd::Zero(1), w4),
                  DimensionGuardError);
}
