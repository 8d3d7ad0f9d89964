#include <cmath>
#include <complex>

#include "doctest.h"
#include "orbitlab/measures.hpp"
#include "orbitlab/rng.hpp"
#include "orbitlab/transport.hpp"

using namespace orbitlab;
using measures::DensityField;
using measures::WeightFunction;

namespace {

Eigen::VectorXcd single_w(std::complex<double> v) {
  Eigen::VectorXcd w(1);
  w(0) = v;
  return w;
}

PotentialOptions wide_box() {
  PotentialOptions opts;
  opts.domain.radius_x = 9.0;
  return opts;
}

DensityField field_1d(const Grid1D& grid, Eigen::VectorXd values,
                      std::string id = "") {
  return DensityField(TensorGrid({grid}), std::move(values), std::move(id));
}

}  // namespace

TEST_CASE("cdf of a uniform density is linear") {
  const Grid1D grid = Grid1D::uniform(0.0, 2.0, 41);
  const GridFunction1D F =
      transport::cdf(field_1d(grid, Eigen::VectorXd::Constant(41, 0.5)));
  CHECK(F.values(0) == 0.0);
  CHECK(F.values(40) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(F.interp(1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("cdf rejects degenerate densities") {
  const Grid1D grid = Grid1D::uniform(0.0, 1.0, 5);
  CHECK_THROWS_AS(transport::cdf(field_1d(grid, Eigen::VectorXd::Zero(5))),
                  DegenerateDensityError);
  const TensorGrid square({grid, grid});
  CHECK_THROWS_AS(
      transport::cdf(DensityField(square, Eigen::VectorXd::Constant(25, 1.0))),
      InvalidSpecError);
}

TEST_CASE("transport between identical densities is the identity") {
  const Grid1D grid = Grid1D::uniform(-1.0, 3.0, 101);
  Eigen::VectorXd rho(101);
  for (Eigen::Index i = 0; i < 101; ++i)
    rho(i) = 1.0 + std::exp(-grid.nodes()(i) * grid.nodes()(i));
  const transport::MonotoneMap1D T =
      transport::monotone_transport(field_1d(grid, rho), field_1d(grid, rho));
  for (Eigen::Index i = 0; i < 101; i += 10)
    CHECK(T(grid.nodes()(i)) ==
          doctest::Approx(grid.nodes()(i)).epsilon(1e-9));
}

TEST_CASE("transport onto a shifted copy is a shift") {
  const Grid1D source = Grid1D::uniform(-2.0, 2.0, 201);
  Eigen::VectorXd rho(201);
  for (Eigen::Index i = 0; i < 201; ++i)
    rho(i) = std::exp(-source.nodes()(i) * source.nodes()(i));
  const Grid1D target(source.nodes().array() + 2.0);
  const transport::MonotoneMap1D T = transport::monotone_transport(
      field_1d(source, rho), field_1d(target, rho));
  for (Eigen::Index i = 5; i < 196; i += 10)
    CHECK(T(source.nodes()(i)) ==
          doctest::Approx(source.nodes()(i) + 2.0).epsilon(1e-9));
}

TEST_CASE("transport rejects a density with an interior zero") {
  const Grid1D grid = Grid1D::uniform(0.0, 1.0, 3);
  Eigen::VectorXd rho(3);
  rho << 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(
      transport::monotone_transport(
          field_1d(grid, rho),
          field_1d(grid, Eigen::VectorXd::Constant(3, 1.0))),
      DegenerateDensityError);
}

TEST_CASE("momentum map transports the quadratic orbit density exactly") {
  // k = 1, m = 1, A = I: the conditional density is uniform on the box and
  // the momentum map is x itself, so the monotone transport is the identity.
  const auto Q =
      make_quadratic_separable(1, 1, Eigen::MatrixXd::Identity(1, 1));
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const double sup = transport::verify_momentum_is_transport(
      *Q, g1, single_w(0.0), Grid1D::uniform(-4.0, 4.0, 513));
  // The momentum grid is shrunk inward by a relative margin, so the match is
  // exact only up to that offset, about 1e-6 of the span here.
  CHECK(sup < 1e-5);
}

TEST_CASE("momentum map transports the projective orbit density") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  for (const std::complex<double> wv : {std::complex<double>(0.0, 0.0),
                                        std::complex<double>(0.5, -0.3)}) {
    const double sup = transport::verify_momentum_is_transport(
        *P, g1, single_w(wv), Grid1D::uniform(-8.0, 8.0, 1025));
    CHECK(sup < 1e-3);
  }
}

TEST_CASE("potential reconstruction from the pushforward") {
  const auto P = make_projective_model(1, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const Grid1D x_grid = Grid1D::uniform(-8.0, 8.0, 2049);
  const Eigen::VectorXcd w = single_w(0.0);
  const DensityField eta = measures::conditional_field(*P, g1, w, x_grid);
  const Grid1D p_grid = measures::dh_momentum_grid(*P, w, x_grid, 1025);
  const DensityField nu =
      measures::dh_pushforward(*P, g1, w, x_grid, p_grid);

  const GridFunction1D u = transport::reconstruct_potential(eta, nu, 0.0);
  const auto report = transport::compare_reconstruction(u, *P, w, 1e-3);
  CHECK(report.pass);
  CHECK(report.sup_norm < 1e-3);

  // convexity of the reconstruction: nonnegative second differences
  const Eigen::VectorXd& nodes = u.grid.nodes();
  for (Eigen::Index i = 1; i + 1 < nodes.size(); ++i) {
    const double h = nodes(i + 1) - nodes(i);
    const double dd =
        (u.values(i + 1) - 2 * u.values(i) + u.values(i - 1)) / (h * h);
    CHECK(dd >= -1e-10);
  }

  // the anchor only shifts the additive constant
  const GridFunction1D u2 = transport::reconstruct_potential(eta, nu, 1.5);
  Eigen::VectorXd diff = u2.values - u.values;
  diff.array() -= diff.mean();
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(transport::reconstruct_potential(eta, nu, 25.0),
                  DomainError);
  CHECK_THROWS_AS(transport::compare_reconstruction(u, *P, w, 0.0),
                  InvalidSpecError);
}

TEST_CASE("matching oracle on sorted point sets") {
  Eigen::VectorXd src(3), dst(3);
  src << 0.0, 1.0, 2.0;
  dst << 5.0, 6.0, 7.0;
  const transport::OtAssignment plan = transport::discrete_ot_oracle(src, dst);
  for (int i = 0; i < 3; ++i) CHECK(plan.assignment[static_cast<size_t>(i)] == i);
  CHECK(plan.cost == doctest::Approx(75.0));
}

TEST_CASE("matching oracle picks the crossing-free plan") {
  // two sources, two sinks placed so the sorted matching wins: cost of the
  // identity pairing is 9 + 16 = 25, the swap costs 25 + 4 = 29
  Eigen::VectorXd src(2), dst(2);
  src << 0.0, 1.0;
  dst << 3.0, 5.0;
  const transport::OtAssignment plan = transport::discrete_ot_oracle(src, dst);
  CHECK(plan.assignment[0] == 0);
  CHECK(plan.assignment[1] == 1);
  CHECK(plan.cost == doctest::Approx(25.0));
}

TEST_CASE("matching oracle reverses against a descending target") {
  Eigen::VectorXd src(4), dst(4);
  src << 0.0, 1.0, 2.0, 3.0;
  dst << 9.0, 7.0, 5.0, 4.0;
  const transport::OtAssignment plan = transport::discrete_ot_oracle(src, dst);
  for (int i = 0; i < 4; ++i)
    CHECK(plan.assignment[static_cast<size_t>(i)] == 3 - i);
}

TEST_CASE("matching oracle edge cases and guards") {
  Eigen::VectorXd pts(2);
  pts << -1.0, 4.0;
  const transport::OtAssignment same = transport::discrete_ot_oracle(pts, pts);
  CHECK(same.cost == doctest::Approx(0.0));
  CHECK_THROWS_AS(transport::discrete_ot_oracle(Eigen::VectorXd::Zero(9),
                                                Eigen::VectorXd::Zero(9)),
                  ComplexityGuardError);
  CHECK_THROWS_AS(transport::discrete_ot_oracle(Eigen::VectorXd::Zero(2),
                                                Eigen::VectorXd::Zero(3)),
                  InvalidSpecError);
  CHECK_THROWS_AS(transport::discrete_ot_oracle(Eigen::VectorXd(),
                                                Eigen::VectorXd()),
                  InvalidSpecError);
}

TEST_CASE("random sorted instances match by rank") {
  Rng rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(7));
    Eigen::VectorXd src(n), dst(n);
    double a = -3.0, b = 1.0;
    for (int i = 0; i < n; ++i) {
      a += 0.05 + rng.uniform();
      b += 0.05 + rng.uniform();
      src(i) = a;
      dst(i) = b;
    }
    const transport::OtAssignment plan =
        transport::discrete_ot_oracle(src, dst);
    for (int i = 0; i < n; ++i)
      CHECK(plan.assignment[static_cast<size_t>(i)] == i);
  }
}

TEST_CASE("conditionals are invariant under the gauge freedoms") {
  const auto P = make_projective_model(1, 1, wide_box());
  const auto Q =
      make_quadratic_separable(1, 1, Eigen::MatrixXd::Identity(1, 1), wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const std::vector<std::complex<double>> w_set = {{0.0, 0.0}, {0.4, 0.2}};
  const auto report = transport::uniqueness_experiment(
      *P, *Q, g1, w_set, Grid1D::uniform(-8.0, 8.0, 257));
  CHECK(report.rows.size() == w_set.size());
  CHECK(report.max_shift_density_dev < 1e-12);
  CHECK(report.max_shift_momentum_dev < 1e-12);
  CHECK(report.max_shift_pushforward_dev < 1e-12);
  CHECK(report.max_weight_scale_dev < 1e-12);
  // the alternative potential really does produce different conditionals
  CHECK(report.min_alt_density_gap > 0.05);
}

TEST_CASE("transport verification guards its inputs") {
  const auto P2 = make_projective_model(2, 1, wide_box());
  const WeightFunction g1 = WeightFunction::constant(1.0);
  CHECK_THROWS_AS(
      transport::verify_momentum_is_transport(*P2, g1, single_w(0.0),
                                              Grid1D::uniform(-4.0, 4.0, 65)),
      DimensionGuardError);
}
