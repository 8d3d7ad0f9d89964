#include <cmath>
#include <complex>

#include "doctest.h"
#include "orbitlab/measures.hpp"
#include "orbitlab/reduction.hpp"

using namespace orbitlab;
using measures::WeightFunction;

namespace {

Eigen::VectorXcd single_w(std::complex<double> v) {
  Eigen::VectorXcd w(1);
  w(0) = v;
  return w;
}

Eigen::VectorXd scalar(double v) { return Eigen::VectorXd::Constant(1, v); }

PotentialOptions wide_box() {
  PotentialOptions opts;
  opts.domain.radius_x = 9.0;
  return opts;
}

// Closed forms for the k = 1, m = 1 projective model with s = e^{2x} and
// t = 1 + |w|^2. The mixed Hessian determinant is
//   phi_xx phi_wwbar - |phi_xwbar|^2
//     = [4st(s+1) - 4s^2|w|^2] / (s+t)^4 = 4s / (s+t)^3,
// and integrating over x gives the orbit average 1 / t^2.
double closed_density(double x, std::complex<double> w) {
  const double s = std::exp(2 * x);
  const double t = 1.0 + std::norm(w);
  return 4 * s / std::pow(s + t, 3);
}

}  // namespace

TEST_CASE("weight function shapes") {
  const WeightFunction c = WeightFunction::constant(2.5);
  CHECK(c(scalar(0.3)) == 2.5);
  CHECK(c.scaled(2.0)(scalar(0.3)) == 5.0);
  CHECK_THROWS_AS(WeightFunction::constant(0.0), InvalidSpecError);
  CHECK_THROWS_AS(c.scaled(-1.0), InvalidSpecError);

  const WeightFunction e =
      WeightFunction::affine_exponential(Eigen::VectorXd::Ones(1));
  CHECK(e(scalar(0.5)) == doctest::Approx(std::exp(0.5)));
  CHECK_THROWS_AS(e(Eigen::VectorXd::Zero(2)), InvalidSpecError);

  Eigen::VectorXd tv(3);
  tv << 1.0, 2.0, 4.0;
  const WeightFunction table =
      WeightFunction::table(GridFunction1D(Grid1D::uniform(0.0, 2.0, 3), tv));
  CHECK(table(scalar(1.0)) == doctest::Approx(2.0));
  CHECK(table(scalar(0.5)) == doctest::Approx(1.5));
  CHECK(table(scalar(5.0)) == doctest::Approx(4.0));   // clamped right
  CHECK(table(scalar(-1.0)) == doctest::Approx(1.0));  // clamped left
  Eigen::VectorXd bad(3);
  bad << 1.0, -2.0, 4.0;
  CHECK_THROWS_AS(
      WeightFunction::table(GridFunction1D(Grid1D::uniform(0.0, 2.0, 3), bad)),
      InvalidSpecError);
}

TEST_CASE("weight validation on momentum samples") {
  const WeightFunction g = WeightFunction::constant(1.0);
  Eigen::MatrixXd samples(3, 1);
  samples << 0.1, 0.5, 1.9;
  g.validate_on(samples);  // no throw
  CHECK(g.describe().size() > 0);
}

TEST_CASE("density field validates and integrates") {
  const TensorGrid grid({Grid1D::uniform(0.0, 2.0, 5)});
  const measures::DensityField f(grid, Eigen::VectorXd::Constant(5, 0.5),
                                 "uniform");
  CHECK(f.mass() == doctest::Approx(1.0));
  CHECK_THROWS_AS(
      measures::DensityField(grid, Eigen::VectorXd::Constant(4, 0.5)),
      InvalidSpecError);
  Eigen::VectorXd neg = Eigen::VectorXd::Constant(5, 0.5);
  neg(2) = -0.1;
  CHECK_THROWS_AS(measures::DensityField(grid, neg), InvalidSpecError);
}

TEST_CASE("local density matches the closed form and carries the weight") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  CHECK(measures::ma_density(*P, g1, scalar(0.0), single_w(0.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(measures::ma_density(*P, g1, scalar(0.7), single_w({0.3, -0.4})) ==
        doctest::Approx(closed_density(0.7, {0.3, -0.4})).epsilon(1e-10));
  // exponential weight multiplies by e^{momentum}; m(0, 0) = 1
  const WeightFunction ge =
      WeightFunction::affine_exponential(Eigen::VectorXd::Ones(1));
  CHECK(measures::ma_density(*P, ge, scalar(0.0), single_w(0.0)) ==
        doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-12));
}

TEST_CASE("orbit averages against closed forms") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 2049);
  CHECK(std::abs(measures::average_density(*P, g1, single_w(0.0), x_grid) -
                 1.0) < 1e-6);
  CHECK(std::abs(measures::average_density(*P, g1, single_w(0.5), x_grid) -
                 0.64) < 1e-6);
}

TEST_CASE("undersized boxes raise truncation errors") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  CHECK_THROWS_AS(measures::average_density(*P, g1, single_w(0.0),
                                            Grid1D::uniform(-6.0, 6.0, 1025)),
                  TruncationError);
  // stricter threshold rejects even the [-8, 8] box
  CHECK_THROWS_AS(measures::average_density(*P, g1, single_w(0.0),
                                            Grid1D::uniform(-8.0, 8.0, 1025),
                                            1e-10),
                  TruncationError);
}

TEST_CASE("box-supported families skip the truncation check") {
  const auto Q =
      make_quadratic_separable(1, 1, Eigen::MatrixXd::Identity(1, 1));
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const double mu = measures::average_density(*Q, g1, single_w(0.0),
                                              Grid1D::uniform(-3.0, 3.0, 129));
  CHECK(mu == doctest::Approx(6.0).epsilon(1e-12));  // det = 1 over [-3, 3]
}

TEST_CASE("conditional density spot values and closed form") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 2049);
  const double eta0 = measures::conditional_density(
      *P, g1, single_w(0.0), scalar(0.0), x_grid);
  CHECK(std::abs(eta0 - 0.5) < 1e-6);

  // eta(x, w) = density / average = 4 s t^2 / (s + t)^3
  const std::complex<double> wv(0.3, -0.7);
  const double mu = measures::average_density(*P, g1, single_w(wv), x_grid);
  const double eta = measures::conditional_density_at(
      *P, g1, single_w(wv), scalar(0.4), mu);
  CHECK(eta == doctest::Approx(closed_density(0.4, wv) / mu).epsilon(1e-8));
}

TEST_CASE("conditional density requires a positive average") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  CHECK_THROWS_AS(measures::conditional_density_at(*P, g1, single_w(0.0),
                                                   scalar(0.0), 0.0),
                  DegenerateDensityError);
}

TEST_CASE("conditional densities normalize to one") {
  const auto P = make_projective_model(1, 1, wide_box());
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 1025);
  const WeightFunction g1 = WeightFunction::constant(1.0);
  for (const std::complex<double> wv : {std::complex<double>(0.0, 0.0),
                                        std::complex<double>(0.9, -1.1)}) {
    CHECK(measures::check_normalization(*P, g1, single_w(wv), x_grid) < 1e-6);
  }
  const WeightFunction ge =
      WeightFunction::affine_exponential(Eigen::VectorXd::Ones(1));
  CHECK(measures::check_normalization(*P, ge, single_w({0.7, 0.0}), x_grid) <
        1e-6);
}

TEST_CASE("conditional field times average equals the local density") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 513);
  const Eigen::VectorXcd w = single_w({0.4, 0.2});
  const double mu = measures::average_density(*P, g1, w, x_grid);
  const measures::DensityField eta =
      measures::conditional_field(*P, g1, w, x_grid);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x_grid.size(); i += 64) {
    const double ma =
        measures::ma_density(*P, g1, scalar(x_grid.nodes()(i)), w);
    worst = std::max(worst, std::abs(eta.values(i) * mu - ma) /
                                std::max(1.0, std::abs(ma)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("default test-function suite is nontrivial") {
  const auto suite = measures::default_test_suite();
  CHECK(suite.size() == 12);
  for (size_t i = 0; i < suite.size(); ++i) {
    CHECK(suite[i].id.size() > 0);
    for (size_t j = i + 1; j < suite.size(); ++j)
      CHECK(suite[i].id != suite[j].id);
  }
  const double v = suite[0].f(scalar(0.0), single_w(0.0));
  CHECK(std::isfinite(v));
}

TEST_CASE("joint and iterated integrals agree on a coarse grid") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 129);
  const Grid1D w_axis = Grid1D::uniform(-2.0, 2.0, 17);
  const TensorGrid w_grid({w_axis, w_axis});
  auto suite = measures::default_test_suite();
  suite.resize(3);
  const auto reports =
      measures::check_disintegration(*P, g1, suite, x_grid, w_grid);
  CHECK(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(std::isfinite(r.lhs));
    CHECK(r.abs_error < 1e-4);
  }
}

TEST_CASE("disintegration guards its wiring") {
  const auto P = make_projective_model(2, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-2.0, 2.0, 33);
  const TensorGrid w_grid({x_grid, x_grid});
  CHECK_THROWS_AS(
      measures::check_disintegration(*P, g1, measures::default_test_suite(),
                                     x_grid, w_grid),
      DimensionGuardError);
  const auto P11 = make_projective_model(1, 1, wide_box());
  CHECK_THROWS_AS(
      measures::check_disintegration(*P11, g1, {}, x_grid, w_grid),
      InvalidSpecError);
}

TEST_CASE("momentum grid spans the image of the x grid") {
  const auto P = make_projective_model(1, 1, wide_box());
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 513);
  const Grid1D p_grid =
      measures::dh_momentum_grid(*P, single_w(0.0), x_grid, 257);
  const double p_lo = reduction::momentum_map(*P, scalar(-8.0), single_w(0.0))(0);
  const double p_hi = reduction::momentum_map(*P, scalar(8.0), single_w(0.0))(0);
  CHECK(p_grid.lo() > p_lo);
  CHECK(p_grid.hi() < p_hi);
  CHECK(p_grid.lo() < p_lo + 1e-5);
  CHECK(p_grid.size() == 257);
}

TEST_CASE("pushforward density matches the linear closed form") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 1025);
  const Grid1D p_grid = measures::dh_momentum_grid(*P, single_w(0.0), x_grid, 513);
  const measures::DensityField nu =
      measures::dh_pushforward(*P, g1, single_w(0.0), x_grid, p_grid);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p_grid.size(); ++i)
    worst = std::max(worst,
                     std::abs(nu.values(i) - (1.0 - p_grid.nodes()(i) / 2)));
  CHECK(worst < 1e-3);
  CHECK(std::abs(nu.mass() - 1.0) < 1e-6);
}

TEST_CASE("pushforward of the quadratic family is uniform") {
  const auto Q =
      make_quadratic_separable(1, 1, Eigen::MatrixXd::Identity(1, 1));
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-4.0, 4.0, 513);
  const Grid1D p_grid = measures::dh_momentum_grid(*Q, single_w(0.0), x_grid, 257);
  const measures::DensityField nu =
      measures::dh_pushforward(*Q, g1, single_w(0.0), x_grid, p_grid);
  for (Eigen::Index i = 0; i < p_grid.size(); i += 32)
    CHECK(nu.values(i) == doctest::Approx(1.0 / 8.0).epsilon(1e-10));
}

TEST_CASE("histogram oracle accepts the projective density") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 1025);
  const auto hist =
      measures::dh_histogram(*P, g1, single_w(0.0), x_grid, 20000, 16, 424242);
  CHECK(hist.pass);
  CHECK(hist.accepted > 0);
  CHECK(hist.proposals >= hist.accepted);
  CHECK(hist.counts.sum() == doctest::Approx(static_cast<double>(hist.accepted)));
  CHECK(hist.bin_edges.size() == 17);
  CHECK_THROWS_AS(
      measures::dh_histogram(*P, g1, single_w(0.0), x_grid, 0, 16, 1),
      InvalidSpecError);
}
