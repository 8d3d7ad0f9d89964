#include "orbitlab/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <memory>
#include <set>

#include "json.hpp"
#include "orbitlab/legendre.hpp"
#include "orbitlab/minors.hpp"
#include "orbitlab/reduction.hpp"
#include "orbitlab/rng.hpp"
#include "orbitlab/transport.hpp"

namespace orbitlab::suites {

namespace {

using legendre::NewtonOptions;
using measures::DensityField;
using measures::WeightFunction;

constexpr double kPi = 3.14159265358979323846;
// Additive constants and weight rescalings must be invisible to the
// conditional data down to round-off.
constexpr double kShiftTol = 1e-12;
// Required sup-gap between conditional densities of potentials with
// different momentum images.
constexpr double kAltGapFloor = 0.05;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void add(SuiteReport& report, const std::string& name, double value,
         double error, double tolerance) {
  report.checks.push_back({name, value, error, tolerance, error <= tolerance});
}

void add_exact(SuiteReport& report, const std::string& name, double cases,
               double failures) {
  report.checks.push_back({name, cases, failures, 0.0, failures == 0.0});
}

void finalize(SuiteReport& report, const Timer& timer) {
  report.pass = std::all_of(report.checks.begin(), report.checks.end(),
                            [](const CheckRecord& c) { return c.pass; });
  report.wall_seconds = timer.seconds();
}

std::unique_ptr<TorusPotential> build_projective(const RunConfig& cfg, int k,
                                                 int m,
                                                 DerivativeMode mode) {
  PotentialOptions opts;
  opts.domain.radius_x = cfg.radius_x;
  opts.domain.radius_w = cfg.radius_w;
  opts.mode = mode;
  return make_projective_model(k, m, opts);
}

WeightFunction build_weight(const RunConfig& cfg, int k) {
  if (cfg.weight_kind == "constant")
    return WeightFunction::constant(cfg.weight_constant);
  if (cfg.weight_kind == "affine_exponential") {
    Eigen::VectorXd a(k);
    if (cfg.weight_a.empty())
      a.setOnes();
    else if (static_cast<int>(cfg.weight_a.size()) == k)
      for (int i = 0; i < k; ++i) a(i) = cfg.weight_a[static_cast<size_t>(i)];
    else
      throw ConfigError("weight a has the wrong dimension");
    return WeightFunction::affine_exponential(a);
  }
  throw ConfigError("table weights need an explicit table, none configured");
}

// All ascending 1-based index lists of size l drawn from {1, ..., n}.
std::vector<std::vector<int>> ascending_subsets(int n, int l) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  const auto rec = [&](auto&& self, int start) -> void {
    if (static_cast<int>(cur.size()) == l) {
      out.push_back(cur);
      return;
    }
    for (int v = start; v <= n; ++v) {
      cur.push_back(v);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

std::vector<int> random_ascending(Rng& rng, int n, int l) {
  std::set<int> s;
  while (static_cast<int>(s.size()) < l)
    s.insert(1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n))));
  return std::vector<int>(s.begin(), s.end());
}

minors::RationalMatrix random_int_matrix(Rng& rng, int n) {
  minors::RationalMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m(i, j) = static_cast<long long>(rng.uniform_int(19)) - 9;
  return m;
}

Eigen::VectorXcd complex_point(Rng& rng, int m, double radius) {
  Eigen::VectorXcd w(m);
  for (int j = 0; j < m; ++j)
    w(j) = std::complex<double>(rng.uniform(-radius, radius),
                                rng.uniform(-radius, radius));
  return w;
}

// For momenta computed as images of interior sample points. The solver's
// relative interior margin guards user-supplied momenta near the bounds; an
// image momentum is interior by construction but can still fall inside that
// band (in k >= 2 one large coordinate shrinks the other axes' momenta).
NewtonOptions image_opts() {
  NewtonOptions opts;
  opts.margin_rel = 0.0;
  return opts;
}

Eigen::VectorXcd single_w(std::complex<double> v) {
  Eigen::VectorXcd w(1);
  w(0) = v;
  return w;
}

}  // namespace

SuiteReport run_minors(const RunConfig& cfg) {
  Timer timer;
  SuiteReport report;
  report.suite = "verify-minors";
  Rng rng(cfg.seed);

  // Pinned instance: composed minor sum against det * double-deletion minor.
  {
    const minors::RationalMatrix m0{{1, 2, 3}, {4, 5, 6}, {7, 8, 10}};
    const minors::MinorSpec spec{{1, 2}, {1, 2}};
    const auto id = minors::verify_minor_identity(m0, spec);
    const bool ok = id.pass && id.lhs == minors::Rational(-30);
    add_exact(report, "pinned_instance_lhs_minus_30",
              id.lhs.convert_to<double>(), ok ? 0.0 : 1.0);
  }

  // Exact identity sweep over every ascending index pair, small sizes.
  {
    long cases = 0, failures = 0;
    for (int n = 2; n <= 5; ++n) {
      for (int l = 1; l <= n; ++l) {
        const auto index_lists = ascending_subsets(n, l);
        for (int rep = 0; rep < 5; ++rep) {
          const minors::RationalMatrix m = random_int_matrix(rng, n);
          for (const auto& alphas : index_lists) {
            for (const auto& betas : index_lists) {
              ++cases;
              if (!minors::verify_minor_identity(m, {alphas, betas}).pass)
                ++failures;
            }
          }
        }
      }
    }
    add_exact(report, "identity_exact_sweep_n_le_5", static_cast<double>(cases),
              static_cast<double>(failures));
  }

  // Floating-point identity at n = 6 with the configured relative tolerance.
  {
    long cases = 0, failures = 0;
    for (int l = 1; l <= 3; ++l) {
      for (int rep = 0; rep < 10; ++rep) {
        Eigen::MatrixXd m(6, 6);
        for (int i = 0; i < 6; ++i)
          for (int j = 0; j < 6; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
        const minors::MinorSpec spec{random_ascending(rng, 6, l),
                                     random_ascending(rng, 6, l)};
        ++cases;
        if (!minors::verify_minor_identity(m, spec, cfg.identity_tol).pass)
          ++failures;
      }
    }
    add_exact(report, "identity_float_n6", static_cast<double>(cases),
              static_cast<double>(failures));
  }

  // Swapping two row indices flips the sign of the permuted minor sum.
  {
    long failures = 0;
    const minors::RationalMatrix m = random_int_matrix(rng, 5);
    const minors::MinorSpec fwd{{1, 3}, {2, 4}};
    const minors::MinorSpec swp{{3, 1}, {2, 4}};
    if (minors::perm_minor_sum(m, fwd) != -minors::perm_minor_sum(m, swp))
      ++failures;
    add_exact(report, "perm_sum_antisymmetry", 1.0,
              static_cast<double>(failures));
  }

  // Cofactors: pinned 2x2 example and the adjugate law M adj(M) = det I.
  {
    long failures = 0;
    const minors::RationalMatrix m{{1, 2}, {3, 4}};
    const minors::RationalMatrix c = minors::cofactor_matrix(m);
    const long long want[2][2] = {{4, -3}, {-2, 1}};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (c(i, j) != minors::Rational(want[i][j])) ++failures;

    const minors::RationalMatrix r = random_int_matrix(rng, 4);
    const minors::Rational d = minors::det(r);
    const minors::RationalMatrix prod =
        r * minors::cofactor_matrix(r).transpose();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (prod(i, j) != (i == j ? d : minors::Rational(0))) ++failures;
    add_exact(report, "cofactor_and_adjugate_law", 1.0,
              static_cast<double>(failures));
  }

  // Deletion edge cases: empty spec reproduces det, full deletion gives 1.
  {
    long failures = 0;
    const minors::RationalMatrix m = random_int_matrix(rng, 4);
    if (minors::multi_minor(m, {}) != minors::det(m)) ++failures;
    if (minors::multi_minor(m, {{1, 2, 3, 4}, {1, 2, 3, 4}}) !=
        minors::Rational(1))
      ++failures;
    add_exact(report, "deletion_edge_cases", 1.0,
              static_cast<double>(failures));
  }

  finalize(report, timer);
  return report;
}

SuiteReport run_legendre(const RunConfig& cfg) {
  Timer timer;
  SuiteReport report;
  report.suite = "verify-legendre";
  const auto P = build_projective(cfg, 1, 1, DerivativeMode::analytic);
  const NewtonOptions opts;

  // Pinned conjugate value at p = 1, w = 0.
  {
    const double value =
        legendre::conjugate_at(*P, Eigen::VectorXd::Constant(1, 1.0),
                               single_w(0.0), opts)
            .value;
    add(report, "conjugate_value_p1_w0", value, std::abs(value + std::log(2.0)),
        cfg.identity_tol);
  }

  // Closed-form conjugate on an interior momentum sweep at w = 0.5.
  {
    const double t = 1.25;
    double worst = 0.0;
    for (int i = 1; i <= 9; ++i) {
      const double p = 0.2 * i;
      const double closed = (p / 2) * std::log(p * t / (2 - p)) -
                            std::log(2 * t / (2 - p));
      const double value =
          legendre::conjugate_at(*P, Eigen::VectorXd::Constant(1, p),
                                 single_w(0.5), opts)
              .value;
      worst = std::max(worst, std::abs(value - closed));
    }
    add(report, "conjugate_closed_form_w05", worst, worst, cfg.roundtrip_tol);
  }

  // Momentum round trip and Young's equality on a point sweep.
  {
    const std::vector<std::complex<double>> ws = {
        {0.0, 0.0}, {0.3, 0.2}, {-0.5, 0.1}, {1.0, -0.7}};
    double worst_roundtrip = 0.0, worst_young = 0.0;
    for (int i = 0; i < 25; ++i) {
      const double xv = -3.0 + 6.0 * i / 24.0;
      const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xv);
      for (const auto& wv : ws) {
        const Eigen::VectorXcd w = single_w(wv);
        const Eigen::VectorXd p = reduction::momentum_map(*P, x, w);
        const auto conj = legendre::conjugate_at(*P, p, w, image_opts());
        const Eigen::VectorXd back =
            reduction::momentum_map(*P, conj.argmax, w);
        worst_roundtrip =
            std::max(worst_roundtrip, (back - p).lpNorm<Eigen::Infinity>());
        worst_young = std::max(
            worst_young,
            std::abs(P->value(x, w) + conj.value - x.dot(p)));
      }
    }
    add(report, "momentum_roundtrip", worst_roundtrip, worst_roundtrip,
        cfg.roundtrip_tol);
    add(report, "young_equality", worst_young, worst_young, cfg.identity_tol);
  }

  // Mixed second derivative of the conjugate against its closed formula.
  {
    double worst = 0.0;
    for (const double xv : {-1.5, 0.0, 1.2}) {
      for (const auto& wv :
           std::vector<std::complex<double>>{{0.3, 0.2}, {-0.4, -0.1}}) {
        const Eigen::VectorXcd w = single_w(wv);
        const Eigen::VectorXd p = reduction::momentum_map(
            *P, Eigen::VectorXd::Constant(1, xv), w);
        worst = std::max(
            worst,
            legendre::conjugate_w_derivative_identity_check(*P, p, w,
                                                            image_opts())
                .max_abs_diff);
      }
    }
    add(report, "w_derivative_identity", worst, worst, cfg.derivative_tol);
  }

  // Discrete transform applied twice returns convex samples exactly.
  {
    const Grid1D x_grid = Grid1D::uniform(-2.0, 2.0, 65);
    Eigen::VectorXd f(x_grid.size());
    for (Eigen::Index i = 0; i < x_grid.size(); ++i)
      f(i) = 0.5 * x_grid.nodes()(i) * x_grid.nodes()(i);
    const GridFunction1D fn(x_grid, f);
    const GridFunction1D conj = legendre::discrete_llt(fn);
    const GridFunction1D back = legendre::discrete_llt(conj, x_grid);
    const double worst = (back.values - f).cwiseAbs().maxCoeff();
    add(report, "llt_biconjugation", worst, worst, cfg.identity_tol);
  }

  // Momentum interval of the m = 0 builtin against the closed form.
  {
    PotentialOptions topts;
    const auto T = make_toric_fs(1, topts);
    const auto image = legendre::moment_image(
        *T, Eigen::VectorXcd(0), Grid1D::uniform(-6.0, 6.0, 201));
    const double closed_lo = 2 * std::exp(-12.0) / (1 + std::exp(-12.0));
    const double closed_hi = 2.0 - closed_lo;
    const double err = std::max(std::abs(image.lower(0) - closed_lo),
                                std::abs(image.upper(0) - closed_hi));
    add(report, "moment_interval_bounds", image.lower(0), err,
        cfg.identity_tol);

    long failures = 0;
    if (!image.contains(Eigen::VectorXd::Constant(1, 1.0), 0.1)) ++failures;
    if (image.contains(Eigen::VectorXd::Constant(1, 2.1), 0.0)) ++failures;
    add_exact(report, "moment_interval_membership", 1.0,
              static_cast<double>(failures));
  }

  // Momenta outside the image margin must be rejected, and the solver must
  // report convergence diagnostics for interior momenta.
  {
    long failures = 0;
    try {
      legendre::conjugate_at(*P, Eigen::VectorXd::Constant(1, 2.5),
                             single_w(0.0), opts);
      ++failures;
    } catch (const DomainError&) {
    }
    const auto res = legendre::conjugate_at(
        *P, Eigen::VectorXd::Constant(1, 1.0), single_w(0.0), opts);
    if (res.iters >= opts.max_iters || res.residual > opts.tol) ++failures;
    add_exact(report, "domain_guard_and_convergence", 1.0,
              static_cast<double>(failures));
  }

  finalize(report, timer);
  return report;
}

SuiteReport run_factorization(const RunConfig& cfg) {
  Timer timer;
  SuiteReport report;
  report.suite = "verify-factorization";
  Rng rng(cfg.seed);
  const NewtonOptions opts;

  // Separable quadratic: all three routes are constants equal to det A.
  {
    PotentialOptions qopts;
    qopts.domain.radius_x = cfg.radius_x;
    qopts.domain.radius_w = cfg.radius_w;
    Eigen::MatrixXd A(2, 2);
    A << 2.0, 0.5, 0.5, 1.0;
    const auto Q = make_quadratic_separable(2, 1, A, qopts);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(-2, 2), rng.uniform(-2, 2);
      const auto rep =
          reduction::verify_factorization(*Q, x, complex_point(rng, 1, 1.0),
                                          cfg.identity_tol, image_opts());
      worst = std::max({worst, rep.rel_err_lhs_rhs, rep.rel_err_lhs_schur,
                        rep.rel_err_rhs_schur});
    }
    add(report, "quadratic_three_way", worst, worst, cfg.identity_tol);
  }

  // Pinned value: mixed determinant 1/2 at the origin for k = m = 1.
  {
    const auto P = build_projective(cfg, 1, 1, DerivativeMode::analytic);
    const auto rep = reduction::verify_factorization(
        *P, Eigen::VectorXd::Zero(1), single_w(0.0), cfg.identity_tol, opts);
    add(report, "projective_spot_half", rep.lhs, std::abs(rep.lhs - 0.5),
        cfg.identity_tol);
  }

  const std::vector<std::pair<int, int>> combos = {{1, 1}, {1, 2}, {2, 1},
                                                   {2, 2}};

  // Three-way agreement across dimensions, analytic derivatives.
  {
    double worst = 0.0;
    long failures = 0;
    for (const auto& [k, m] : combos) {
      const auto P = build_projective(cfg, k, m, DerivativeMode::analytic);
      for (int i = 0; i < 25; ++i) {
        Eigen::VectorXd x(k);
        for (int a = 0; a < k; ++a) x(a) = rng.uniform(-2, 2);
        const auto rep = reduction::verify_factorization(
            *P, x, complex_point(rng, m, 1.0), cfg.factorization_tol,
            image_opts());
        worst = std::max({worst, rep.rel_err_lhs_rhs, rep.rel_err_lhs_schur,
                          rep.rel_err_rhs_schur});
        if (!rep.pass) ++failures;
      }
    }
    add(report, "projective_three_way_analytic", worst, worst,
        cfg.factorization_tol);
    add_exact(report, "projective_three_way_analytic_failures", 100.0,
              static_cast<double>(failures));
  }

  // Same agreement with finite-difference derivative bundles.
  {
    double worst = 0.0;
    for (const auto& [k, m] : combos) {
      const auto P =
          build_projective(cfg, k, m, DerivativeMode::finite_difference);
      for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd x(k);
        for (int a = 0; a < k; ++a) x(a) = rng.uniform(-2, 2);
        const auto rep = reduction::verify_factorization(
            *P, x, complex_point(rng, m, 1.0), cfg.derivative_tol,
            image_opts());
        worst = std::max({worst, rep.rel_err_lhs_rhs, rep.rel_err_lhs_schur,
                          rep.rel_err_rhs_schur});
      }
    }
    add(report, "projective_three_way_fd", worst, worst, cfg.derivative_tol);
  }

  // Proof-shaped minor expansion against the direct reduced determinant.
  {
    double worst = 0.0;
    const std::vector<std::pair<int, int>> small = {
        {1, 1}, {2, 1}, {1, 2}, {2, 2}, {3, 3}};
    for (const auto& [k, m] : small) {
      const auto P = build_projective(cfg, k, m, DerivativeMode::analytic);
      for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd x(k);
        for (int a = 0; a < k; ++a) x(a) = rng.uniform(-1.5, 1.5);
        worst = std::max(
            worst, reduction::minor_expansion_crosscheck(
                       *P, x, complex_point(rng, m, 0.8), image_opts())
                       .discrepancy);
      }
    }
    add(report, "minor_expansion_crosscheck", worst, worst,
        cfg.factorization_tol);
  }

  // Positivity: x-Hessian determinants and reduced-form eigenvalues.
  {
    long failures = 0;
    const auto P = build_projective(cfg, 2, 2, DerivativeMode::analytic);
    for (int i = 0; i < 10; ++i) {
      Eigen::VectorXd x(2);
      x << rng.uniform(-2, 2), rng.uniform(-2, 2);
      const Eigen::VectorXcd w = complex_point(rng, 2, 0.8);
      const DerivativeBundle b = P->eval_bundle(x, w);
      if (!(minors::det(b.hess_xx) > 0)) ++failures;
      const auto rf = reduction::reduced_form(*P, b.grad_x, w, image_opts(), x);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rf.sigma);
      if (!(eig.eigenvalues().minCoeff() > 0)) ++failures;
    }
    add_exact(report, "hessian_and_sigma_positivity", 10.0,
              static_cast<double>(failures));
  }

  // Reduced-form disc integral falls linearly in the momentum level.
  {
    const auto P = build_projective(cfg, 1, 1, DerivativeMode::analytic);
    const Grid1D r_grid = Grid1D::uniform(0.0, cfg.radius_w, 513);
    double worst = 0.0;
    for (const double q : {0.4, 0.8, 1.2}) {
      Eigen::VectorXd integrand(r_grid.size());
      for (Eigen::Index i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid.nodes()(i);
        const auto rf = reduction::reduced_form(
            *P, Eigen::VectorXd::Constant(1, q), single_w(r), opts);
        integrand(i) = 2 * kPi * r * rf.sigma(0, 0).real();
      }
      const double value = trapezoid(r_grid, integrand);
      const double closed =
          (1 - q / 2) * kPi *
          (1 - 1 / (1 + cfg.radius_w * cfg.radius_w));
      worst = std::max(worst, std::abs(value - closed));
    }
    add(report, "sigma_disc_integral_linear_in_q", worst, worst,
        cfg.disintegration_tol);
  }

  finalize(report, timer);
  return report;
}

SuiteReport run_disintegration(const RunConfig& cfg) {
  Timer timer;
  SuiteReport report;
  report.suite = "verify-disintegration";
  const auto P = build_projective(cfg, 1, 1, DerivativeMode::analytic);
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const WeightFunction g_cfg = build_weight(cfg, 1);
  const Grid1D x_grid =
      Grid1D::uniform(-cfg.x_extent, cfg.x_extent, cfg.x_nodes);
  const NewtonOptions opts;

  // Orbit averages against the closed forms 1 and 1/(1+|w|^2)^2.
  {
    const double mu0 = measures::average_density(*P, g1, single_w(0.0), x_grid);
    add(report, "orbit_average_w0", mu0, std::abs(mu0 - 1.0),
        cfg.normalization_tol);
    const double mu5 = measures::average_density(*P, g1, single_w(0.5), x_grid);
    add(report, "orbit_average_w05", mu5, std::abs(mu5 - 0.64),
        cfg.normalization_tol);
  }

  // Conditional density at the origin against the closed form 1/2.
  {
    const double eta0 = measures::conditional_density(
        *P, g1, single_w(0.0), Eigen::VectorXd::Zero(1), x_grid, opts);
    add(report, "conditional_origin_half", eta0, std::abs(eta0 - 0.5),
        cfg.normalization_tol);
  }

  // Orbit mass one across a spread of w values.
  {
    const std::vector<std::complex<double>> ws = {
        {0.0, 0.0},  {0.5, 0.0},  {0.0, 0.7},  {-0.6, 0.2}, {0.9, 0.9},
        {-1.1, 0.4}, {0.3, -1.2}, {1.4, -0.3}, {-0.8, -0.9}, {1.2, 1.1}};
    double worst = 0.0;
    for (const auto& wv : ws)
      worst = std::max(worst, measures::check_normalization(
                                  *P, g1, single_w(wv), x_grid, opts));
    add(report, "normalization_sweep", worst, worst, cfg.normalization_tol);
  }

  // Exponentially weighted variant; the average carries the weight too.
  {
    const WeightFunction ge =
        WeightFunction::affine_exponential(Eigen::VectorXd::Ones(1));
    const double err = measures::check_normalization(*P, ge, single_w(0.7),
                                                     x_grid, opts);
    add(report, "normalization_exp_weight", err, err, cfg.normalization_tol);
  }

  // Pointwise consistency eta * mu_hat = density along a sample sweep.
  {
    double worst = 0.0;
    for (const auto& wv :
         std::vector<std::complex<double>>{{0.0, 0.0}, {0.4, -0.6}}) {
      const Eigen::VectorXcd w = single_w(wv);
      const double mu = measures::average_density(*P, g_cfg, w, x_grid);
      for (int i = 0; i < 20; ++i) {
        const double xv = -5.0 + 10.0 * i / 19.0;
        const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, xv);
        const double eta =
            measures::conditional_density_at(*P, g_cfg, w, x, mu, opts);
        const double ma = measures::ma_density(*P, g_cfg, x, w);
        worst = std::max(worst, std::abs(eta * mu - ma) /
                                    std::max(1.0, std::abs(ma)));
      }
    }
    add(report, "eta_mu_consistency", worst, worst, cfg.factorization_tol);
  }

  // Joint versus iterated integrals for the test-function family.
  {
    const Grid1D w_axis =
        Grid1D::uniform(-cfg.w_extent, cfg.w_extent, cfg.w_nodes);
    const TensorGrid w_grid({w_axis, w_axis});
    const auto reports = measures::check_disintegration(
        *P, g_cfg, measures::default_test_suite(), x_grid, w_grid, opts);
    for (const auto& r : reports)
      add(report, "disintegration_" + r.f_id, r.lhs, r.abs_error,
          cfg.disintegration_tol);
  }

  // Density dumps for external plotting.
  {
    const DensityField eta =
        measures::conditional_field(*P, g_cfg, single_w(0.0), x_grid, opts);
    write_orbit_density_csv(eta, single_w(0.0),
                            cfg.output_dir + "/conditional_density.csv");

    const Grid1D w_axis = Grid1D::uniform(-cfg.w_extent, cfg.w_extent, 33);
    const TensorGrid w_grid({w_axis, w_axis});
    Eigen::VectorXd mu_values(w_grid.size());
    for (Eigen::Index i = 0; i < w_grid.size(); ++i) {
      const Eigen::VectorXd wxy = w_grid.point(i);
      mu_values(i) = measures::average_density(
          *P, g_cfg, single_w({wxy(0), wxy(1)}), x_grid);
    }
    const DensityField mu_field(w_grid, std::move(mu_values), "orbit_average");
    write_orbit_density_csv(mu_field, Eigen::VectorXcd(0),
                            cfg.output_dir + "/orbit_average.csv");
  }

  finalize(report, timer);
  return report;
}

SuiteReport run_transport(const RunConfig& cfg) {
  Timer timer;
  SuiteReport report;
  report.suite = "verify-transport";
  Rng rng(cfg.seed);
  const auto P = build_projective(cfg, 1, 1, DerivativeMode::analytic);
  const WeightFunction g1 = WeightFunction::constant(1.0);
  const WeightFunction ge =
      WeightFunction::affine_exponential(Eigen::VectorXd::Ones(1));
  const Grid1D t_grid =
      Grid1D::uniform(-cfg.x_extent, cfg.x_extent, cfg.t_nodes);
  const NewtonOptions opts;
  const Eigen::VectorXcd w0 = single_w(0.0);

  // Momentum map versus the monotone rearrangement, plain and reweighted.
  {
    const double sup =
        transport::verify_momentum_is_transport(*P, g1, w0, t_grid, opts);
    add(report, "momentum_is_transport", sup, sup, cfg.transport_tol);
    const double sup_e =
        transport::verify_momentum_is_transport(*P, ge, w0, t_grid, opts);
    add(report, "momentum_is_transport_exp_weight", sup_e, sup_e,
        cfg.transport_tol);
  }

  // Pushforward density against 1 - p/2 and its unit mass.
  const Grid1D p_grid = measures::dh_momentum_grid(*P, w0, t_grid, cfg.p_nodes);
  const DensityField nu =
      measures::dh_pushforward(*P, g1, w0, t_grid, p_grid, opts);
  {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < p_grid.size(); ++i)
      worst = std::max(worst, std::abs(nu.values(i) -
                                       (1.0 - p_grid.nodes()(i) / 2)));
    add(report, "dh_density_shape", worst, worst, cfg.transport_tol);
    add(report, "dh_mass_one", nu.mass(), std::abs(nu.mass() - 1.0),
        cfg.normalization_tol);
  }

  // Monte-Carlo histogram of momenta against binomial predictions.
  {
    const auto hist = measures::dh_histogram(*P, g1, w0, t_grid, 100000, 32,
                                             cfg.seed, opts);
    add(report, "dh_histogram_3sigma", hist.max_sigma_units,
        hist.pass ? 0.0 : 1.0, 0.0);
  }

  // Potential recovery from the conditional data, up to a constant.
  {
    const DensityField eta =
        measures::conditional_field(*P, g1, w0, t_grid, opts);
    const GridFunction1D u = transport::reconstruct_potential(eta, nu, 0.0);
    const auto rec =
        transport::compare_reconstruction(u, *P, w0, cfg.transport_tol);
    add(report, "reconstruction_sup", rec.sup_norm, rec.sup_norm,
        cfg.transport_tol);

    long failures = 0;
    for (Eigen::Index i = 1; i + 1 < u.grid.size(); ++i) {
      const double dd = u.values(i + 1) - 2 * u.values(i) + u.values(i - 1);
      if (dd < -1e-10) ++failures;
    }
    add_exact(report, "reconstruction_convexity", 1.0,
              static_cast<double>(failures));

    const GridFunction1D u2 = transport::reconstruct_potential(eta, nu, 1.5);
    Eigen::VectorXd diff = u.values - u2.values;
    diff.array() -= diff.mean();
    const double dev = diff.cwiseAbs().maxCoeff();
    add(report, "reconstruction_anchor_invariance", dev, dev, kShiftTol);
  }

  // Constant shifts and weight rescalings are invisible; a potential with a
  // different momentum image is not.
  {
    PotentialOptions qopts;
    qopts.domain.radius_x = cfg.radius_x;
    qopts.domain.radius_w = cfg.radius_w;
    const auto Q =
        make_quadratic_separable(1, 1, Eigen::MatrixXd::Identity(1, 1), qopts);
    const Grid1D x_grid =
        Grid1D::uniform(-cfg.x_extent, cfg.x_extent, cfg.x_nodes);
    const auto uniq = transport::uniqueness_experiment(
        *P, *Q, g1, {{0.0, 0.0}, {0.5, 0.3}, {0.0, -0.4}}, x_grid, 0.7, 2.0,
        opts);
    add(report, "uniqueness_shift_density", uniq.max_shift_density_dev,
        uniq.max_shift_density_dev, kShiftTol);
    add(report, "uniqueness_shift_momentum", uniq.max_shift_momentum_dev,
        uniq.max_shift_momentum_dev, kShiftTol);
    add(report, "uniqueness_shift_pushforward", uniq.max_shift_pushforward_dev,
        uniq.max_shift_pushforward_dev, kShiftTol);
    add(report, "uniqueness_weight_scale", uniq.max_weight_scale_dev,
        uniq.max_weight_scale_dev, kShiftTol);
    report.checks.push_back({"uniqueness_alt_gap", uniq.min_alt_density_gap,
                             std::max(0.0, kAltGapFloor -
                                               uniq.min_alt_density_gap),
                             kAltGapFloor,
                             uniq.min_alt_density_gap >= kAltGapFloor});
  }

  // Sorted 1-D point sets must match through the identity assignment.
  {
    long failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.uniform_int(7));
      Eigen::VectorXd s(n), t(n);
      for (int i = 0; i < n; ++i) s(i) = rng.uniform(-5, 5);
      for (int i = 0; i < n; ++i) t(i) = rng.uniform(-5, 5);
      std::sort(s.data(), s.data() + n);
      std::sort(t.data(), t.data() + n);
      const auto ot = transport::discrete_ot_oracle(s, t);
      for (int i = 0; i < n; ++i)
        if (ot.assignment[static_cast<size_t>(i)] != i) ++failures;
    }
    add_exact(report, "ot_sorted_identity_trials", 100.0,
              static_cast<double>(failures));

    Eigen::VectorXd c(5);
    c << -2, -1, 0, 1, 2;
    const auto ot = transport::discrete_ot_oracle(c, c);
    add_exact(report, "ot_coincident_zero_cost", 1.0,
              ot.cost == 0.0 ? 0.0 : 1.0);
  }

  write_momentum_density_csv(nu, cfg.output_dir + "/dh_density.csv");

  finalize(report, timer);
  return report;
}

std::vector<SuiteReport> run(const RunConfig& cfg) {
  config::validate(cfg);
  std::vector<SuiteReport> reports;
  const auto want = [&](const char* name) {
    return cfg.suite == "all" || cfg.suite == name;
  };
  if (want("verify-minors")) reports.push_back(run_minors(cfg));
  if (want("verify-legendre")) reports.push_back(run_legendre(cfg));
  if (want("verify-factorization")) reports.push_back(run_factorization(cfg));
  if (want("verify-disintegration"))
    reports.push_back(run_disintegration(cfg));
  if (want("verify-transport")) reports.push_back(run_transport(cfg));
  return reports;
}

std::string report_json(const std::vector<SuiteReport>& reports) {
  nlohmann::ordered_json doc;
  doc["schema"] = 1;
  doc["suites"] = nlohmann::ordered_json::array();
  bool all_pass = true;
  for (const auto& report : reports) {
    nlohmann::ordered_json suite;
    suite["suite"] = report.suite;
    suite["checks"] = nlohmann::ordered_json::array();
    for (const auto& check : report.checks) {
      nlohmann::ordered_json c;
      c["name"] = check.name;
      c["value"] = check.value;
      c["error"] = check.error;
      c["tolerance"] = check.tolerance;
      c["pass"] = check.pass;
      suite["checks"].push_back(c);
    }
    suite["pass"] = report.pass;
    doc["suites"].push_back(suite);
    all_pass = all_pass && report.pass;
  }
  doc["pass"] = all_pass;
  return doc.dump(2) + "\n";
}

void write_report(const std::vector<SuiteReport>& reports,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write report to '" + path + "'");
  out << report_json(reports);
}

namespace {

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_orbit_density_csv(const measures::DensityField& field,
                             const Eigen::VectorXcd& w,
                             const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV to '" + path + "'");
  for (int a = 0; a < field.grid.dims(); ++a)
    out << "x_" << (a + 1) << ",";
  for (Eigen::Index j = 0; j < w.size(); ++j)
    out << "re_w_" << (j + 1) << ",im_w_" << (j + 1) << ",";
  out << "value\n";
  for (Eigen::Index i = 0; i < field.grid.size(); ++i) {
    const Eigen::VectorXd pt = field.grid.point(i);
    for (Eigen::Index a = 0; a < pt.size(); ++a)
      out << format_double(pt(a)) << ",";
    for (Eigen::Index j = 0; j < w.size(); ++j)
      out << format_double(w(j).real()) << "," << format_double(w(j).imag())
          << ",";
    out << format_double(field.values(i)) << "\n";
  }
}

void write_momentum_density_csv(const measures::DensityField& field,
                                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write CSV to '" + path + "'");
  for (int a = 0; a < field.grid.dims(); ++a)
    out << "p_" << (a + 1) << ",";
  out << "value\n";
  for (Eigen::Index i = 0; i < field.grid.size(); ++i) {
    const Eigen::VectorXd pt = field.grid.point(i);
    for (Eigen::Index a = 0; a < pt.size(); ++a)
      out << format_double(pt(a)) << ",";
    out << format_double(field.values(i)) << "\n";
  }
}

}  // namespace orbitlab::suites
