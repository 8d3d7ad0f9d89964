#include "orbitlab/measures.hpp"

#include <algorithm>
#include <cmath>

#include "orbitlab/minors.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/rng.hpp"

namespace orbitlab::measures {

namespace {

// Relative agreement demanded between the change-of-variables density and
// the direct reduced formula inside dh_pushforward.
constexpr double kPipelineConsistencyTol = 1e-8;

NewtonOptions interior_opts(const NewtonOptions& opts) {
  NewtonOptions out = opts;
  out.margin_rel = 0.0;  // grid momenta reach the sampled bounds
  return out;
}

}  // namespace

WeightFunction::WeightFunction(Kind kind, double prefactor)
    : kind_(kind), prefactor_(prefactor) {}

WeightFunction WeightFunction::constant(double c) {
  if (!(c > 0)) throw InvalidSpecError("constant weight must be positive");
  return WeightFunction(Kind::constant, c);
}

WeightFunction WeightFunction::affine_exponential(const Eigen::VectorXd& a) {
  WeightFunction g(Kind::affine_exponential, 1.0);
  g.a_ = a;
  return g;
}

WeightFunction WeightFunction::table(GridFunction1D samples) {
  if (samples.values.size() == 0 || samples.values.minCoeff() <= 0)
    throw InvalidSpecError("table weight must be positive everywhere");
  WeightFunction g(Kind::table, 1.0);
  g.samples_ = std::move(samples);
  return g;
}

double WeightFunction::operator()(const Eigen::VectorXd& p) const {
  switch (kind_) {
    case Kind::constant:
      return prefactor_;
    case Kind::affine_exponential:
      if (p.size() != a_.size())
        throw InvalidSpecError("weight momentum dimension mismatch");
      return prefactor_ * std::exp(a_.dot(p));
    case Kind::table: {
      if (p.size() != 1)
        throw InvalidSpecError("table weight is one-dimensional");
      const double q =
          std::clamp(p(0), samples_.grid.lo(), samples_.grid.hi());
      return prefactor_ * samples_.interp(q);
    }
  }
  throw InvalidSpecError("unreachable weight kind");
}

WeightFunction WeightFunction::scaled(double s) const {
  if (!(s > 0)) throw InvalidSpecError("weight scale must be positive");
  WeightFunction g = *this;
  g.prefactor_ *= s;
  return g;
}

void WeightFunction::validate_on(const Eigen::MatrixXd& momentum_samples) const {
  for (Eigen::Index i = 0; i < momentum_samples.rows(); ++i) {
    if (!((*this)(momentum_samples.row(i).transpose()) > 0))
      throw InvalidSpecError("weight is not positive on the momentum samples");
  }
}

std::string WeightFunction::describe() const {
  switch (kind_) {
    case Kind::constant:
      return "constant";
    case Kind::affine_exponential:
      return "affine_exponential";
    case Kind::table:
      return "table";
  }
  return "unknown";
}

DensityField::DensityField(TensorGrid g, Eigen::VectorXd v, std::string field_id)
    : grid(std::move(g)), values(std::move(v)), id(std::move(field_id)) {
  if (values.size() != grid.size())
    throw InvalidSpecError("density values do not match the grid");
  if (values.size() > 0 && values.minCoeff() < 0)
    throw InvalidSpecError("density values must be nonnegative");
  quadrature_weights.resize(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    quadrature_weights(i) = grid.weight(i);
}

double ma_density(const TorusPotential& P, const WeightFunction& g,
                  const Eigen::VectorXd& x, const Eigen::VectorXcd& w) {
  const DerivativeBundle b = P.eval_bundle(x, w);
  return g(b.grad_x) * mixed_hessian(b).det;
}

double average_density(const TorusPotential& P, const WeightFunction& g,
                       const Eigen::VectorXcd& w, const Grid1D& x_grid,
                       double boundary_rel_tol) {
  if (P.k() != 1) throw DimensionGuardError("orbit average needs k = 1");
  Eigen::VectorXd values(x_grid.size());
  for (Eigen::Index i = 0; i < x_grid.size(); ++i)
    values(i) = ma_density(P, g, Eigen::VectorXd::Constant(1, x_grid.nodes()(i)), w);
  if (!P.box_supported()) {
    const double peak = values.maxCoeff();
    const double boundary = std::max(values(0), values(values.size() - 1));
    if (boundary > boundary_rel_tol * peak)
      throw TruncationError("x grid truncates too much mass");
  }
  return trapezoid(x_grid, values);
}

double conditional_density_at(const TorusPotential& P, const WeightFunction& g,
                              const Eigen::VectorXcd& w,
                              const Eigen::VectorXd& x, double mu_hat,
                              const NewtonOptions& opts) {
  if (!(mu_hat > 0)) throw DegenerateDensityError("orbit average is not positive");
  const DerivativeBundle b = P.eval_bundle(x, w);
  const double sigma_m =
      reduction::reduced_form(P, b.grad_x, w, interior_opts(opts), x).sigma_m;
  const double sign = (P.m() % 2 == 0) ? 1.0 : -1.0;
  return sign * g(b.grad_x) * sigma_m * minors::det(b.hess_xx) / mu_hat;
}

double conditional_density(const TorusPotential& P, const WeightFunction& g,
                           const Eigen::VectorXcd& w, const Eigen::VectorXd& x,
                           const Grid1D& x_grid, const NewtonOptions& opts) {
  return conditional_density_at(P, g, w, x,
                                average_density(P, g, w, x_grid), opts);
}

DensityField conditional_field(const TorusPotential& P,
                               const WeightFunction& g,
                               const Eigen::VectorXcd& w, const Grid1D& x_grid,
                               const NewtonOptions& opts) {
  const double mu_hat = average_density(P, g, w, x_grid);
  Eigen::VectorXd values(x_grid.size());
  for (Eigen::Index i = 0; i < x_grid.size(); ++i)
    values(i) = conditional_density_at(
        P, g, w, Eigen::VectorXd::Constant(1, x_grid.nodes()(i)), mu_hat, opts);
  return DensityField(TensorGrid({x_grid}), std::move(values), "conditional");
}

double check_normalization(const TorusPotential& P, const WeightFunction& g,
                           const Eigen::VectorXcd& w, const Grid1D& x_grid,
                           const NewtonOptions& opts) {
  return std::abs(conditional_field(P, g, w, x_grid, opts).mass() - 1.0);
}

std::vector<TestFunction> default_test_suite() {
  using VXd = Eigen::VectorXd;
  using VXcd = Eigen::VectorXcd;
  const auto gauss = [](double x, std::complex<double> w, double sx, double sw) {
    return std::exp(-x * x / sx - std::norm(w) / sw);
  };
  std::vector<TestFunction> fs;
  fs.push_back({"const_one", [](const VXd&, const VXcd&) { return 1.0; }});
  fs.push_back({"w_gauss", [](const VXd&, const VXcd& w) {
                  return std::exp(-std::norm(w(0)));
                }});
  fs.push_back({"x_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return x(0) * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"x2_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return x(0) * x(0) * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"rew_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return w(0).real() * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"imw_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return w(0).imag() * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"x_rew_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return x(0) * w(0).real() * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"absw2_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return std::norm(w(0)) * gauss(x(0), w(0), 4, 1);
                }});
  fs.push_back({"x3_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return std::pow(x(0), 3) * gauss(x(0), w(0), 8, 2);
                }});
  fs.push_back({"x2_imw2_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return x(0) * x(0) * std::pow(w(0).imag(), 2) *
                         gauss(x(0), w(0), 4, 2);
                }});
  fs.push_back({"rew2_imw_gauss", [gauss](const VXd& x, const VXcd& w) {
                  return std::pow(w(0).real(), 2) * w(0).imag() *
                         gauss(x(0), w(0), 2, 1);
                }});
  fs.push_back({"shifted_gauss", [](const VXd& x, const VXcd& w) {
                  const double dx = x(0) - 1.0;
                  return dx * std::exp(-dx * dx / 4 -
                                       std::norm(w(0) - 0.3));
                }});
  return fs;
}

std::vector<DisintegrationReport> check_disintegration(
    const TorusPotential& P, const WeightFunction& g,
    const std::vector<TestFunction>& f_suite, const Grid1D& x_grid,
    const TensorGrid& w_grid, const NewtonOptions& opts) {
  if (P.k() != 1 || P.m() != 1)
    throw DimensionGuardError("disintegration check is wired for k = 1, m = 1");
  if (w_grid.dims() != 2)
    throw InvalidSpecError("w grid needs two axes (Re w, Im w)");
  if (f_suite.empty()) throw InvalidSpecError("empty test-function suite");

  const size_t nf = f_suite.size();
  std::vector<double> lhs(nf, 0.0), rhs(nf, 0.0);
  std::vector<double> inner(nf, 0.0);

  const NewtonOptions iopts = interior_opts(opts);
  const Eigen::VectorXd x_weights = trapezoid_weights(x_grid);
  for (Eigen::Index wi = 0; wi < w_grid.size(); ++wi) {
    const Eigen::VectorXd wxy = w_grid.point(wi);
    const double w_weight = w_grid.weight(wi);
    Eigen::VectorXcd w(1);
    w(0) = std::complex<double>(wxy(0), wxy(1));

    const double mu_hat = average_density(P, g, w, x_grid);
    std::fill(inner.begin(), inner.end(), 0.0);
    for (Eigen::Index xi = 0; xi < x_grid.size(); ++xi) {
      const Eigen::VectorXd x =
          Eigen::VectorXd::Constant(1, x_grid.nodes()(xi));
      const double x_weight = x_weights(xi);
      const double ma = ma_density(P, g, x, w);
      const double eta = conditional_density_at(P, g, w, x, mu_hat, iopts);
      for (size_t fi = 0; fi < nf; ++fi) {
        const double fv = f_suite[fi].f(x, w);
        lhs[fi] += w_weight * x_weight * fv * ma;
        inner[fi] += x_weight * fv * eta;
      }
    }
    for (size_t fi = 0; fi < nf; ++fi)
      rhs[fi] += w_weight * mu_hat * inner[fi];
  }

  std::vector<DisintegrationReport> reports(nf);
  for (size_t fi = 0; fi < nf; ++fi) {
    reports[fi].f_id = f_suite[fi].id;
    reports[fi].lhs = lhs[fi];
    reports[fi].rhs = rhs[fi];
    reports[fi].abs_error = std::abs(lhs[fi] - rhs[fi]);
  }
  return reports;
}

Grid1D dh_momentum_grid(const TorusPotential& P, const Eigen::VectorXcd& w,
                        const Grid1D& x_grid, Eigen::Index n,
                        double interior_frac) {
  if (P.k() != 1) throw DimensionGuardError("momentum grid helper needs k = 1");
  const double p_lo =
      reduction::momentum_map(P, Eigen::VectorXd::Constant(1, x_grid.lo()), w)(0);
  const double p_hi =
      reduction::momentum_map(P, Eigen::VectorXd::Constant(1, x_grid.hi()), w)(0);
  const double shift = interior_frac * (p_hi - p_lo);
  return Grid1D::uniform(p_lo + shift, p_hi - shift, n);
}

DensityField dh_pushforward(const TorusPotential& P, const WeightFunction& g,
                            const Eigen::VectorXcd& w, const Grid1D& x_grid,
                            const Grid1D& p_grid, const NewtonOptions& opts) {
  if (P.k() != 1)
    throw DimensionGuardError("change-of-variables pushforward needs k = 1");
  const double mu_hat = average_density(P, g, w, x_grid);
  const double sign = (P.m() % 2 == 0) ? 1.0 : -1.0;
  const NewtonOptions iopts = interior_opts(opts);

  Eigen::VectorXd values(p_grid.size());
  std::optional<Eigen::VectorXd> hint;
  for (Eigen::Index i = 0; i < p_grid.size(); ++i) {
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, p_grid.nodes()(i));
    const Eigen::VectorXd x = legendre::grad_p_conjugate(P, p, w, iopts, hint);
    hint = x;
    const DerivativeBundle b = P.eval_bundle(x, w);
    const double eta = conditional_density_at(P, g, w, x, mu_hat, iopts);
    const double cov = eta / b.hess_xx(0, 0);
    const double sigma_m = reduction::reduced_form(P, p, w, iopts, x).sigma_m;
    const double direct = sign * g(p) * sigma_m / mu_hat;
    if (std::abs(cov - direct) >
        kPipelineConsistencyTol * std::max(1.0, std::abs(direct)))
      throw SolverError("pushforward routes disagree beyond tolerance");
    values(i) = cov;
  }
  return DensityField(TensorGrid({p_grid}), std::move(values), "dh_pushforward");
}

HistogramReport dh_histogram(const TorusPotential& P, const WeightFunction& g,
                             const Eigen::VectorXcd& w, const Grid1D& x_grid,
                             std::int64_t n_samples, int n_bins,
                             std::uint64_t seed, const NewtonOptions& opts) {
  if (P.k() != 1) throw DimensionGuardError("histogram oracle needs k = 1");
  if (n_samples <= 0 || n_bins <= 0)
    throw InvalidSpecError("histogram needs positive sample and bin counts");

  // Envelope for rejection sampling on the x range.
  Eigen::VectorXd scan(x_grid.size());
  for (Eigen::Index i = 0; i < x_grid.size(); ++i)
    scan(i) = ma_density(P, g, Eigen::VectorXd::Constant(1, x_grid.nodes()(i)), w);
  const double bound = 1.05 * scan.maxCoeff();

  // Predicted bin masses from the change-of-variables density.
  const Grid1D p_fine = dh_momentum_grid(P, w, x_grid, 8 * n_bins + 1);
  const DensityField nu = dh_pushforward(P, g, w, x_grid, p_fine, opts);
  const Eigen::VectorXd cdf_fine =
      cumtrapz(p_fine, nu.values) / trapezoid(p_fine, nu.values);
  const GridFunction1D cdf_interp(p_fine, cdf_fine);

  HistogramReport report;
  report.bin_edges.resize(n_bins + 1);
  const double p_lo = p_fine.lo(), p_hi = p_fine.hi();
  for (int b = 0; b <= n_bins; ++b)
    report.bin_edges(b) = p_lo + (p_hi - p_lo) * b / n_bins;
  report.counts = Eigen::VectorXd::Zero(n_bins);

  Rng rng(seed);
  std::int64_t accepted = 0;
  for (std::int64_t s = 0; s < n_samples; ++s) {
    const double x = rng.uniform(x_grid.lo(), x_grid.hi());
    const double u = rng.uniform(0.0, bound);
    ++report.proposals;
    const double density =
        ma_density(P, g, Eigen::VectorXd::Constant(1, x), w);
    if (u > density) continue;
    ++accepted;
    const double p =
        reduction::momentum_map(P, Eigen::VectorXd::Constant(1, x), w)(0);
    int b = static_cast<int>((p - p_lo) / (p_hi - p_lo) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);
    report.counts(b) += 1.0;
  }
  report.accepted = accepted;

  report.expected.resize(n_bins);
  report.max_sigma_units = 0.0;
  bool pass = true;
  for (int b = 0; b < n_bins; ++b) {
    const double q_lo = cdf_interp.interp(report.bin_edges(b));
    const double q_hi = cdf_interp.interp(report.bin_edges(b + 1));
    const double q = std::max(q_hi - q_lo, 0.0);
    report.expected(b) = static_cast<double>(accepted) * q;
    const double sigma =
        std::sqrt(static_cast<double>(accepted) * q * (1.0 - q));
    const double dev = std::abs(report.counts(b) - report.expected(b));
    if (sigma > 0)
      report.max_sigma_units = std::max(report.max_sigma_units, dev / sigma);
    if (dev > 3.0 * sigma + 1.0) pass = false;
  }
  report.pass = pass;
  return report;
}

}  // namespace orbitlab::measures
