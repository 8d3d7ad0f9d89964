#include <vector>

#include "doctest.h"
#include "orbitlab/minors.hpp"
#include "orbitlab/rng.hpp"

using namespace orbitlab;
using minors::MinorSpec;
using minors::Rational;
using minors::RationalMatrix;

namespace {

RationalMatrix random_int_matrix(Rng& rng, Eigen::Index n) {
  RationalMatrix m(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = static_cast<long long>(rng.uniform_int(19)) - 9;
  return m;
}

}  // namespace

TEST_CASE("exact determinant of pinned 2x2 and 3x3 instances") {
  CHECK(minors::det(RationalMatrix{{1, 2}, {3, 4}}) == Rational(-2));
  CHECK(minors::det(RationalMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}}) ==
        Rational(-3));
}

TEST_CASE("float determinant agrees with the exact path") {
  Rng rng(11);
  const RationalMatrix m = random_int_matrix(rng, 5);
  Eigen::MatrixXd md(5, 5);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j)
      md(i, j) = m(i, j).convert_to<double>();
  const double exact = minors::det(m).convert_to<double>();
  CHECK(minors::det(md) ==
        doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("determinant edge sizes") {
  CHECK(minors::det(Eigen::MatrixXd(0, 0)) == 1.0);
  Eigen::MatrixXd one(1, 1);
  one << -7.5;
  CHECK(minors::det(one) == -7.5);
}

TEST_CASE("multi minor deletes the listed rows and columns") {
  const RationalMatrix m{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
  // delete row 3 and column 3: det [[1,2],[4,5]] = -3
  CHECK(minors::multi_minor(m, {{3}, {3}}) == Rational(-3));
  // delete row 1 and column 2: det [[4,6],[7,10]] = -2
  CHECK(minors::multi_minor(m, {{1}, {2}}) == Rational(-2));
}

TEST_CASE("empty deletion gives det, full deletion gives 1") {
  Rng rng(5);
  const RationalMatrix m = random_int_matrix(rng, 4);
  CHECK(minors::multi_minor(m, {}) == minors::det(m));
  CHECK(minors::multi_minor(m, {{1, 2, 3, 4}, {1, 2, 3, 4}}) == Rational(1));
}

TEST_CASE("pinned composed-minor instance evaluates to -30 on both sides") {
  const RationalMatrix m{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
  const auto report = minors::verify_minor_identity(m, {{1, 2}, {1, 2}});
  CHECK(report.lhs == Rational(-30));
  CHECK(report.rhs == Rational(-30));
  CHECK(report.pass);
}

TEST_CASE("identity holds exactly for all ascending pairs at small sizes") {
  Rng rng(20260816);
  for (Eigen::Index n = 2; n <= 4; ++n) {
    const RationalMatrix m = random_int_matrix(rng, n);
    std::vector<std::vector<int>> lists;
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::vector<int> ids;
      for (int b = 0; b < n; ++b)
        if (mask & (1 << b)) ids.push_back(b + 1);
      lists.push_back(ids);
    }
    for (const auto& alphas : lists)
      for (const auto& betas : lists) {
        if (alphas.size() != betas.size()) continue;
        CHECK(minors::verify_minor_identity(m, {alphas, betas}).pass);
      }
  }
}

TEST_CASE("identity holds in floating point at n = 6") {
  Rng rng(7);
  Eigen::MatrixXd m(6, 6);
  for (Eigen::Index i = 0; i < 6; ++i)
    for (Eigen::Index j = 0; j < 6; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  for (const auto& spec : {MinorSpec{{1, 4}, {2, 5}},
                           MinorSpec{{2, 3, 6}, {1, 4, 5}},
                           MinorSpec{{1}, {6}}}) {
    const auto report = minors::verify_minor_identity(m, spec, 1e-10);
    CHECK(report.pass);
  }
}

TEST_CASE("permuted minor sum with l = 1 is a single minor") {
  Rng rng(3);
  const RationalMatrix m = random_int_matrix(rng, 4);
  CHECK(minors::perm_minor_sum(m, {{2}, {3}}) ==
        minors::multi_minor(m, {{2}, {3}}));
}

TEST_CASE("permuted minor sum is antisymmetric in the row indices") {
  Rng rng(9);
  const RationalMatrix m = random_int_matrix(rng, 5);
  CHECK(minors::perm_minor_sum(m, {{1, 3}, {2, 4}}) ==
        -minors::perm_minor_sum(m, {{3, 1}, {2, 4}}));
  Eigen::MatrixXd md(4, 4);
  Rng rng2(13);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) md(i, j) = rng2.uniform(-1.0, 1.0);
  CHECK(minors::perm_minor_sum(md, {{1, 2}, {3, 4}}) ==
        doctest::Approx(-minors::perm_minor_sum(md, {{2, 1}, {3, 4}})));
}

TEST_CASE("cofactor matrix of the pinned 2x2 example") {
  const RationalMatrix c = minors::cofactor_matrix(RationalMatrix{{1, 2}, {3, 4}});
  CHECK(c(0, 0) == Rational(4));
  CHECK(c(0, 1) == Rational(-3));
  CHECK(c(1, 0) == Rational(-2));
  CHECK(c(1, 1) == Rational(1));
}

TEST_CASE("adjugate law M adj(M) = det(M) I") {
  Rng rng(17);
  const RationalMatrix m = random_int_matrix(rng, 4);
  const Rational d = minors::det(m);
  const RationalMatrix prod = m * minors::cofactor_matrix(m).transpose();
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j)
      CHECK(prod(i, j) == (i == j ? d : Rational(0)));
}

TEST_CASE("minor specs with repeated or out-of-range indices are rejected") {
  const RationalMatrix m = RationalMatrix::identity(4);
  CHECK_THROWS_AS(minors::multi_minor(m, {{1, 1}, {2, 3}}), InvalidSpecError);
  CHECK_THROWS_AS(minors::multi_minor(m, {{0}, {1}}), InvalidSpecError);
  CHECK_THROWS_AS(minors::multi_minor(m, {{5}, {1}}), InvalidSpecError);
  CHECK_THROWS_AS(minors::multi_minor(m, {{1, 2}, {3}}), InvalidSpecError);
}

TEST_CASE("identity check requires ascending indices") {
  const RationalMatrix m = RationalMatrix::identity(4);
  CHECK_THROWS_AS(minors::verify_minor_identity(m, {{2, 1}, {3, 4}}),
                  InvalidSpecError);
}

TEST_CASE("factorial guard rejects l > 8") {
  const RationalMatrix m = RationalMatrix::identity(10);
  MinorSpec spec;
  for (int i = 1; i <= 9; ++i) {
    spec.alphas.push_back(i);
    spec.betas.push_back(i);
  }
  CHECK_THROWS_AS(minors::perm_minor_sum(m, spec), ComplexityGuardError);
}

TEST_CASE("rational matrix utilities") {
  const RationalMatrix id = RationalMatrix::identity(3);
  CHECK(minors::det(id) == Rational(1));
  Eigen::MatrixXi mi(2, 2);
  mi << 1, 2, 3, 4;
  CHECK(minors::det(RationalMatrix::from_int(mi)) == Rational(-2));
  const RationalMatrix t = RationalMatrix{{1, 2}, {3, 4}}.transpose();
  CHECK(t(0, 1) == Rational(3));
}
