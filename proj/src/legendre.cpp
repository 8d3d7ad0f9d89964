#include "orbitlab/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orbitlab::legendre {

namespace {

bool pinned_to_box(const Eigen::VectorXd& x, const Eigen::VectorXd& grad_f,
                   double radius) {
  // Minimizing f: a boundary point is pinned when the gradient pushes out.
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) >= radius - 1e-9 && grad_f(i) < 0) return true;
    if (x(i) <= -radius + 1e-9 && grad_f(i) > 0) return true;
  }
  return false;
}

}  // namespace

void momentum_axis_bounds(const TorusPotential& P, const Eigen::VectorXcd& w,
                          Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const int k = P.k();
  const double r = P.domain().radius_x;
  lo = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  hi = -lo;
  for (long corner = 0; corner < (1L << k); ++corner) {
    Eigen::VectorXd x(k);
    for (int i = 0; i < k; ++i) x(i) = (corner >> i) & 1 ? r : -r;
    const Eigen::VectorXd g = P.eval_bundle(x, w).grad_x;
    lo = lo.cwiseMin(g);
    hi = hi.cwiseMax(g);
  }
}

ConjugateResult conjugate_at(const TorusPotential& P, const Eigen::VectorXd& p,
                             const Eigen::VectorXcd& w,
                             const NewtonOptions& opts,
                             const std::optional<Eigen::VectorXd>& initial_guess) {
  if (p.size() != P.k()) throw InvalidSpecError("momentum dimension mismatch");
  if (!p.allFinite()) throw InvalidSpecError("momentum must be finite");
  const double radius = P.domain().radius_x;

  if (opts.margin_rel > 0) {
    Eigen::VectorXd lo, hi;
    momentum_axis_bounds(P, w, lo, hi);
    for (int i = 0; i < P.k(); ++i) {
      const double margin = opts.margin_rel * (hi(i) - lo(i));
      if (p(i) < lo(i) + margin || p(i) > hi(i) - margin)
        throw DomainError("momentum outside interior margin");
    }
  }

  Eigen::VectorXd x = initial_guess.value_or(Eigen::VectorXd::Zero(P.k()));
  x = x.cwiseMax(-radius).cwiseMin(radius);

  ConjugateResult result;
  double residual = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad_f;
  for (int iter = 0; iter <= opts.max_iters; ++iter) {
    const DerivativeBundle b = P.eval_bundle(x, w);
    grad_f = b.grad_x - p;
    residual = grad_f.lpNorm<Eigen::Infinity>();
    if (residual <= opts.tol) {
      result.value = p.dot(x) - b.value;
      result.argmax = x;
      result.iters = iter;
      result.residual = residual;
      return result;
    }
    if (iter == opts.max_iters) break;

    const Eigen::VectorXd d = b.hess_xx.llt().solve(-grad_f);
    const double f0 = b.value - p.dot(x);
    const double slope = grad_f.dot(d);
    // Once the predicted decrease -slope/2 sinks below the rounding noise of
    // f, the backtracking test compares garbage and can reject every step.
    // The pure Newton step is safe there: slope = -d'Hd, so a tiny slope
    // means a tiny step, and convergence is quadratic near the minimizer.
    const double f_scale =
        std::max({std::abs(f0), std::abs(b.value), std::abs(p.dot(x)), 1e-12});
    const double f_noise =
        64.0 * std::numeric_limits<double>::epsilon() * f_scale;
    Eigen::VectorXd xn;
    if (-slope <= f_noise) {
      xn = (x + d).cwiseMax(-radius).cwiseMin(radius);
    } else {
      double t = 1.0;
      bool stepped = false;
      while (t >= 1e-14) {
        xn = (x + t * d).cwiseMax(-radius).cwiseMin(radius);
        const double fn = P.value(xn, w) - p.dot(xn);
        if (fn <= f0 + opts.armijo_c * t * slope) {
          stepped = true;
          break;
        }
        t /= 2;
      }
      if (!stepped) break;
    }
    if ((xn - x).lpNorm<Eigen::Infinity>() == 0.0) break;
    x = xn;
  }

  if (pinned_to_box(x, grad_f, radius))
    throw DomainError("conjugate argmax pinned to the working-box boundary");
  throw SolverError("conjugate solver did not reach tolerance");
}

Eigen::VectorXd grad_p_conjugate(const TorusPotential& P,
                                 const Eigen::VectorXd& p,
                                 const Eigen::VectorXcd& w,
                                 const NewtonOptions& opts,
                                 const std::optional<Eigen::VectorXd>& initial_guess) {
  return conjugate_at(P, p, w, opts, initial_guess).argmax;
}

WDerivativeReport conjugate_w_derivative_identity_check(
    const TorusPotential& P, const Eigen::VectorXd& p,
    const Eigen::VectorXcd& w, const NewtonOptions& opts, double h_rel) {
  NewtonOptions tight = opts;
  tight.tol = std::min(opts.tol, 1e-12);
  const int k = P.k(), m = P.m();
  const std::complex<double> I(0.0, 1.0);

  WDerivativeReport report;
  report.fd.resize(k, m);
  report.formula.resize(k, m);

  const Eigen::VectorXd x0 = grad_p_conjugate(P, p, w, tight);
  for (int j = 0; j < m; ++j) {
    const double hr = h_rel * (1.0 + std::abs(w(j).real()));
    const double hi = h_rel * (1.0 + std::abs(w(j).imag()));
    Eigen::VectorXcd wrp = w, wrm = w, wip = w, wim = w;
    wrp(j) += hr;
    wrm(j) -= hr;
    wip(j) += I * hi;
    wim(j) -= I * hi;
    const Eigen::VectorXd d_re =
        (grad_p_conjugate(P, p, wrp, tight, x0) -
         grad_p_conjugate(P, p, wrm, tight, x0)) /
        (2 * hr);
    const Eigen::VectorXd d_im =
        (grad_p_conjugate(P, p, wip, tight, x0) -
         grad_p_conjugate(P, p, wim, tight, x0)) /
        (2 * hi);
    report.fd.col(j) = 0.5 * (d_re.cast<std::complex<double>>() -
                              I * d_im.cast<std::complex<double>>());
  }

  const DerivativeBundle b = P.eval_bundle(x0, w);
  // grad_x phi_{w_j} is the conjugate of the xwbar block's column.
  const Eigen::MatrixXcd rhs = b.hess_xwbar.conjugate();
  const Eigen::MatrixXd sol_re = b.hess_xx.llt().solve(rhs.real().eval());
  const Eigen::MatrixXd sol_im = b.hess_xx.llt().solve(rhs.imag().eval());
  report.formula = -(sol_re.cast<std::complex<double>>() +
                     std::complex<double>(0, 1) *
                         sol_im.cast<std::complex<double>>());
  report.max_abs_diff = (report.fd - report.formula).cwiseAbs().maxCoeff();
  return report;
}

Eigen::MatrixXcd conjugate_w_hessian(const TorusPotential& P,
                                     const Eigen::VectorXd& p,
                                     const Eigen::VectorXcd& w,
                                     const NewtonOptions& opts,
                                     const std::optional<Eigen::VectorXd>& initial_guess) {
  const Eigen::VectorXd x = grad_p_conjugate(P, p, w, opts, initial_guess);
  const DerivativeBundle b = P.eval_bundle(x, w);
  const Eigen::MatrixXcd hinv_b = b.hess_xx.llt()
                                      .solve(b.hess_xwbar.real())
                                      .cast<std::complex<double>>() +
                                  std::complex<double>(0, 1) *
                                      b.hess_xx.llt()
                                          .solve(b.hess_xwbar.imag())
                                          .cast<std::complex<double>>();
  Eigen::MatrixXcd out = -b.hess_wwbar + b.hess_xwbar.adjoint() * hinv_b;
  return ((out + out.adjoint()) / 2.0).eval();
}

GridFunction1D discrete_llt(const GridFunction1D& f) {
  const Eigen::Index n = f.grid.size();
  if (n < 3) throw InvalidSpecError("llt needs at least 3 samples");
  Eigen::VectorXd slopes(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    slopes(i) = (f.values(i + 1) - f.values(i)) /
                (f.grid.nodes()(i + 1) - f.grid.nodes()(i));
  const double slope_tol =
      1e-12 * std::max(1.0, slopes.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i + 1 < n - 1; ++i)
    if (slopes(i + 1) < slopes(i) - slope_tol)
      throw ConvexityError("non-convex samples");
  // The secant slopes are the natural dual nodes: every sample point keeps a
  // supporting slope, so conjugating twice returns convex samples exactly.
  // A uniform dual grid misses slopes and loses that involution property.
  std::vector<double> dual;
  dual.reserve(static_cast<size_t>(n - 1));
  dual.push_back(slopes(0));
  for (Eigen::Index i = 1; i + 1 < n; ++i)
    if (slopes(i) > dual.back() + slope_tol) dual.push_back(slopes(i));
  if (dual.size() < 2)
    throw DomainError("conjugate support degenerates to a point");
  const Eigen::VectorXd dual_nodes =
      Eigen::Map<const Eigen::VectorXd>(dual.data(), dual.size());
  return discrete_llt(f, Grid1D(dual_nodes));
}

GridFunction1D discrete_llt(const GridFunction1D& f, const Grid1D& out_grid) {
  const Eigen::Index n = f.grid.size();
  if (n < 3) throw InvalidSpecError("llt needs at least 3 samples");
  Eigen::VectorXd slopes(n - 1);
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    slopes(i) = (f.values(i + 1) - f.values(i)) /
                (f.grid.nodes()(i + 1) - f.grid.nodes()(i));
  const double slope_tol =
      1e-12 * std::max(1.0, slopes.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i + 1 < n - 1; ++i)
    if (slopes(i + 1) < slopes(i) - slope_tol)
      throw ConvexityError("non-convex samples");

  Eigen::VectorXd out(out_grid.size());
  Eigen::Index j = 0;
  for (Eigen::Index t = 0; t < out_grid.size(); ++t) {
    const double p = out_grid.nodes()(t);
    while (j < n - 1 && slopes(j) < p) ++j;
    out(t) = p * f.grid.nodes()(j) - f.values(j);
  }
  return GridFunction1D(out_grid, out);
}

bool MomentImage::contains(const Eigen::VectorXd& p, double margin) const {
  if (p.size() != lower.size()) throw InvalidSpecError("dimension mismatch");
  if (p.size() == 1)
    return p(0) >= lower(0) + margin && p(0) <= upper(0) - margin;
  // Convex polygon, counter-clockwise: inside iff left of every edge.
  for (size_t e = 0; e < hull.size(); ++e) {
    const Eigen::VectorXd& a = hull[e];
    const Eigen::VectorXd& b = hull[(e + 1) % hull.size()];
    const double ex = b(0) - a(0), ey = b(1) - a(1);
    const double len = std::hypot(ex, ey);
    const double cross = ex * (p(1) - a(1)) - ey * (p(0) - a(0));
    if (cross < margin * len) return false;
  }
  return true;
}

MomentImage moment_image(const TorusPotential& P, const Eigen::VectorXcd& w,
                         const Grid1D& axis_grid) {
  const int k = P.k();
  if (k > 2)
    throw DimensionGuardError("moment_image hulls support k <= 2");

  MomentImage image;
  const Eigen::Index n = axis_grid.size();
  const Eigen::Index total = (k == 1) ? n : n * n;
  image.samples.resize(total, k);
  for (Eigen::Index flat = 0; flat < total; ++flat) {
    Eigen::VectorXd x(k);
    if (k == 1) {
      x(0) = axis_grid.nodes()(flat);
    } else {
      x(0) = axis_grid.nodes()(flat / n);
      x(1) = axis_grid.nodes()(flat % n);
    }
    image.samples.row(flat) = P.eval_bundle(x, w).grad_x.transpose();
  }
  image.lower = image.samples.colwise().minCoeff().transpose();
  image.upper = image.samples.colwise().maxCoeff().transpose();

  if (k == 1) {
    image.hull = {image.lower, image.upper};
    return image;
  }

  // Andrew's monotone chain on the sample cloud.
  std::vector<Eigen::Vector2d> pts(static_cast<size_t>(total));
  for (Eigen::Index i = 0; i < total; ++i)
    pts[static_cast<size_t>(i)] = image.samples.row(i).transpose();
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  std::vector<Eigen::Vector2d> chain(2 * pts.size());
  size_t h = 0;
  for (const auto& pt : pts) {
    while (h >= 2 && cross(chain[h - 2], chain[h - 1], pt) <= 0) --h;
    chain[h++] = pt;
  }
  const size_t lower_end = h + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (h >= lower_end && cross(chain[h - 2], chain[h - 1], *it) <= 0) --h;
    chain[h++] = *it;
  }
  chain.resize(h - 1);
  image.hull.reserve(chain.size());
  for (const auto& pt : chain) image.hull.push_back(pt);
  return image;
}

}  // namespace orbitlab::legendre
