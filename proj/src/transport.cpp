#include "orbitlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "orbitlab/reduction.hpp"

namespace orbitlab::transport {

namespace {

void require_1d(const DensityField& field, const char* role) {
  if (field.grid.dims() != 1)
    throw InvalidSpecError(std::string(role) + " density must be 1-D");
}

void require_interior_positive(const DensityField& field, const char* role) {
  for (Eigen::Index i = 1; i + 1 < field.values.size(); ++i)
    if (!(field.values(i) > 0))
      throw DegenerateDensityError(std::string(role) +
                                   " density vanishes on the interior");
}

// Inverse of an increasing CDF sampled on nodes, by linear interpolation.
double inverse_cdf(const Grid1D& nodes, const Eigen::VectorXd& cdf_values,
                   double u) {
  const Eigen::Index n = nodes.size();
  if (u <= cdf_values(0)) return nodes.nodes()(0);
  if (u >= cdf_values(n - 1)) return nodes.nodes()(n - 1);
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    (cdf_values(mid) <= u ? lo : hi) = mid;
  }
  const double df = cdf_values(hi) - cdf_values(lo);
  if (!(df > 0)) throw DegenerateDensityError("flat CDF segment");
  const double t = (u - cdf_values(lo)) / df;
  return nodes.nodes()(lo) + t * (nodes.nodes()(hi) - nodes.nodes()(lo));
}

}  // namespace

GridFunction1D cdf(const DensityField& density) {
  require_1d(density, "input");
  const Grid1D& grid = density.grid.axis(0);
  Eigen::VectorXd cum = cumtrapz(grid, density.values);
  const double mass = cum(cum.size() - 1);
  if (!(mass > 0)) throw DegenerateDensityError("density has zero mass");
  cum /= mass;
  return GridFunction1D(grid, cum);
}

double MonotoneMap1D::operator()(double x) const {
  return GridFunction1D(x_nodes, T_values).interp(x);
}

MonotoneMap1D monotone_transport(const DensityField& source,
                                 const DensityField& target) {
  require_1d(source, "source");
  require_1d(target, "target");
  require_interior_positive(source, "source");
  require_interior_positive(target, "target");

  const GridFunction1D F = cdf(source);
  const GridFunction1D G = cdf(target);

  MonotoneMap1D map;
  map.x_nodes = F.grid;
  map.source_id = source.id;
  map.target_id = target.id;
  map.T_values.resize(F.grid.size());
  for (Eigen::Index i = 0; i < F.grid.size(); ++i)
    map.T_values(i) = inverse_cdf(G.grid, G.values, F.values(i));
  for (Eigen::Index i = 0; i + 1 < map.T_values.size(); ++i)
    if (!(map.T_values(i + 1) > map.T_values(i)))
      throw DegenerateDensityError("transport map is not strictly increasing");
  return map;
}

double verify_momentum_is_transport(const TorusPotential& P,
                                    const WeightFunction& g,
                                    const Eigen::VectorXcd& w,
                                    const Grid1D& x_grid,
                                    const NewtonOptions& opts) {
  if (P.k() != 1)
    throw DimensionGuardError("transport comparison needs k = 1");
  const DensityField eta = measures::conditional_field(P, g, w, x_grid, opts);
  const Grid1D p_grid = measures::dh_momentum_grid(P, w, x_grid, x_grid.size());
  const DensityField nu = measures::dh_pushforward(P, g, w, x_grid, p_grid, opts);
  const MonotoneMap1D T = monotone_transport(eta, nu);

  double sup = 0.0;
  for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
    const double m = reduction::momentum_map(
        P, Eigen::VectorXd::Constant(1, x_grid.nodes()(i)), w)(0);
    sup = std::max(sup, std::abs(m - T.T_values(i)));
  }
  return sup;
}

GridFunction1D reconstruct_potential(const DensityField& eta,
                                     const DensityField& nu, double anchor_x) {
  const MonotoneMap1D T = monotone_transport(eta, nu);
  if (anchor_x < T.x_nodes.lo() || anchor_x > T.x_nodes.hi())
    throw DomainError("anchor outside the node range");
  const Eigen::VectorXd raw = cumtrapz(T.x_nodes, T.T_values);
  const GridFunction1D raw_fn(T.x_nodes, raw);
  const double at_anchor = raw_fn.interp(anchor_x);
  return GridFunction1D(T.x_nodes, Eigen::VectorXd(raw.array() - at_anchor));
}

ReconstructionReport compare_reconstruction(const GridFunction1D& u,
                                            const TorusPotential& P,
                                            const Eigen::VectorXcd& w,
                                            double tol) {
  if (tol <= 0) throw InvalidSpecError("tolerance must be positive");
  ReconstructionReport report;
  report.w = w;
  const Eigen::Index n = u.grid.size();
  Eigen::VectorXd diff(n);
  for (Eigen::Index i = 0; i < n; ++i)
    diff(i) = u.values(i) -
              P.value(Eigen::VectorXd::Constant(1, u.grid.nodes()(i)), w);
  diff.array() -= diff.mean();
  report.sup_norm = diff.cwiseAbs().maxCoeff();
  report.pass = report.sup_norm <= tol;
  return report;
}

OtAssignment discrete_ot_oracle(const Eigen::VectorXd& source_points,
                                const Eigen::VectorXd& target_points) {
  const Eigen::Index n = source_points.size();
  if (n != target_points.size())
    throw InvalidSpecError("point sets must have equal size");
  if (n == 0) throw InvalidSpecError("point sets must be nonempty");
  if (n > 8) throw ComplexityGuardError("exhaustive matching needs size <= 8");

  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  const auto cost_of = [&](const std::vector<int>& s) {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = source_points(i) - target_points(s[static_cast<size_t>(i)]);
      c += d * d;
    }
    return c;
  };

  OtAssignment best;
  best.assignment = perm;
  best.cost = cost_of(perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double c = cost_of(perm);
    if (c < best.cost) {
      best.cost = c;
      best.assignment = perm;
    }
  }
  return best;
}

UniquenessReport uniqueness_experiment(
    const TorusPotential& P, const TorusPotential& P_alt,
    const WeightFunction& g, const std::vector<std::complex<double>>& w_set,
    const Grid1D& x_grid, double offset_c, double g_scale,
    const NewtonOptions& opts) {
  if (P.k() != 1 || P.m() != 1)
    throw DimensionGuardError("uniqueness experiment is wired for k = 1, m = 1");
  if (P_alt.k() != 1 || P_alt.m() != 1)
    throw DimensionGuardError("alternative potential must match k = 1, m = 1");
  if (w_set.empty()) throw InvalidSpecError("empty w set");

  const std::unique_ptr<TorusPotential> P_shift = P.with_offset(offset_c);
  const WeightFunction g_scaled = g.scaled(g_scale);

  UniquenessReport report;
  report.min_alt_density_gap = std::numeric_limits<double>::infinity();
  for (const std::complex<double>& wv : w_set) {
    Eigen::VectorXcd w(1);
    w(0) = wv;
    UniquenessRow row;
    row.w = wv;

    const DensityField eta = measures::conditional_field(P, g, w, x_grid, opts);
    const DensityField eta_shift =
        measures::conditional_field(*P_shift, g, w, x_grid, opts);
    const DensityField eta_scaled =
        measures::conditional_field(P, g_scaled, w, x_grid, opts);
    const DensityField eta_alt =
        measures::conditional_field(P_alt, g, w, x_grid, opts);
    row.shift_density_dev =
        (eta.values - eta_shift.values).cwiseAbs().maxCoeff();
    row.weight_scale_dev =
        (eta.values - eta_scaled.values).cwiseAbs().maxCoeff();
    row.alt_density_gap = (eta.values - eta_alt.values).cwiseAbs().maxCoeff();

    for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, x_grid.nodes()(i));
      const double dm = std::abs(reduction::momentum_map(P, x, w)(0) -
                                 reduction::momentum_map(*P_shift, x, w)(0));
      row.shift_momentum_dev = std::max(row.shift_momentum_dev, dm);
    }

    const Grid1D p_grid = measures::dh_momentum_grid(P, w, x_grid, x_grid.size());
    const DensityField nu = measures::dh_pushforward(P, g, w, x_grid, p_grid, opts);
    const DensityField nu_shift =
        measures::dh_pushforward(*P_shift, g, w, x_grid, p_grid, opts);
    row.shift_pushforward_dev =
        (nu.values - nu_shift.values).cwiseAbs().maxCoeff();

    report.max_shift_density_dev =
        std::max(report.max_shift_density_dev, row.shift_density_dev);
    report.max_shift_momentum_dev =
        std::max(report.max_shift_momentum_dev, row.shift_momentum_dev);
    report.max_shift_pushforward_dev =
        std::max(report.max_shift_pushforward_dev, row.shift_pushforward_dev);
    report.max_weight_scale_dev =
        std::max(report.max_weight_scale_dev, row.weight_scale_dev);
    report.min_alt_density_gap =
        std::min(report.min_alt_density_gap, row.alt_density_gap);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace orbitlab::transport
