#include "orbitlab/potentials.hpp"

#include <cmath>

#include "orbitlab/minors.hpp"

namespace orbitlab {

namespace {

constexpr double kDomainSlack = 1.05;  // overhang for difference stencils

void require_sizes(const TorusPotential& P, const Eigen::VectorXd& x,
                   const Eigen::VectorXcd& w) {
  if (x.size() != P.k() || w.size() != P.m())
    throw InvalidSpecError("point dimension mismatch");
}

}  // namespace

TorusPotential::TorusPotential(int k, int m, PotentialOptions opts)
    : k_(k), m_(m), opts_(std::move(opts)) {
  if (k_ < 1) throw InvalidSpecError("potential needs k >= 1");
  if (m_ < 0) throw InvalidSpecError("potential needs m >= 0");
  if (!(opts_.domain.radius_x > 0) || !(opts_.domain.radius_w > 0))
    throw InvalidSpecError("working box radii must be positive");
  if (!(opts_.fd_step > 0)) throw InvalidSpecError("fd step must be positive");
}

void TorusPotential::check_domain(const Eigen::VectorXd& x,
                                  const Eigen::VectorXcd& w) const {
  require_sizes(*this, x, w);
  const double rx = opts_.domain.radius_x * kDomainSlack;
  const double rw = opts_.domain.radius_w * kDomainSlack;
  for (int i = 0; i < k_; ++i)
    if (!std::isfinite(x(i)) || std::abs(x(i)) > rx)
      throw DomainError("x outside working box");
  for (int j = 0; j < m_; ++j) {
    if (!std::isfinite(w(j).real()) || !std::isfinite(w(j).imag()) ||
        std::abs(w(j).real()) > rw || std::abs(w(j).imag()) > rw)
      throw DomainError("w outside working box");
  }
}

double TorusPotential::value(const Eigen::VectorXd& x,
                             const Eigen::VectorXcd& w) const {
  check_domain(x, w);
  return value_impl(x, w) + opts_.offset;
}

DerivativeBundle TorusPotential::eval_bundle(const Eigen::VectorXd& x,
                                             const Eigen::VectorXcd& w) const {
  check_domain(x, w);
  DerivativeBundle b = (opts_.mode == DerivativeMode::analytic)
                           ? analytic_bundle(x, w)
                           : fd_bundle(x, w);
  b.value += opts_.offset;
  Eigen::LLT<Eigen::MatrixXd> llt(b.hess_xx);
  if (llt.info() != Eigen::Success)
    throw ConvexityError("hess_xx not positive definite");
  return b;
}

DerivativeBundle TorusPotential::fd_bundle(const Eigen::VectorXd& x,
                                           const Eigen::VectorXcd& w) const {
  // Gradients by central differences of the value; second-derivative blocks
  // by central differences of the analytic gradients (one order down keeps
  // roundoff within the module tolerance at the mandated step size).
  const int k = k_, m = m_;
  const std::complex<double> I(0.0, 1.0);
  DerivativeBundle b;
  b.value = value_impl(x, w);
  b.grad_x.resize(k);
  b.hess_xx.resize(k, k);
  b.grad_w.resize(m);
  b.hess_wwbar.resize(m, m);
  b.hess_xwbar.resize(k, m);

  const auto step = [&](double coord) {
    return opts_.fd_step * (1.0 + std::abs(coord));
  };

  for (int i = 0; i < k; ++i) {
    const double h = step(x(i));
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    b.grad_x(i) = (value_impl(xp, w) - value_impl(xm, w)) / (2 * h);
    const DerivativeBundle gp = analytic_bundle(xp, w);
    const DerivativeBundle gm = analytic_bundle(xm, w);
    b.hess_xx.col(i) = (gp.grad_x - gm.grad_x) / (2 * h);
  }

  for (int j = 0; j < m; ++j) {
    const double hr = step(w(j).real());
    const double hi = step(w(j).imag());
    Eigen::VectorXcd wrp = w, wrm = w, wip = w, wim = w;
    wrp(j) += hr;
    wrm(j) -= hr;
    wip(j) += I * hi;
    wim(j) -= I * hi;

    const double d_re = (value_impl(x, wrp) - value_impl(x, wrm)) / (2 * hr);
    const double d_im = (value_impl(x, wip) - value_impl(x, wim)) / (2 * hi);
    b.grad_w(j) = 0.5 * (d_re - I * d_im);

    const DerivativeBundle brp = analytic_bundle(x, wrp);
    const DerivativeBundle brm = analytic_bundle(x, wrm);
    const DerivativeBundle bip = analytic_bundle(x, wip);
    const DerivativeBundle bim = analytic_bundle(x, wim);

    // d/dwbar_j = (d/dRe + i d/dIm)/2 applied to grad_x and grad_w.
    b.hess_xwbar.col(j) = 0.5 * ((brp.grad_x - brm.grad_x) / (2 * hr) +
                                 I * (bip.grad_x - bim.grad_x) / (2 * hi));
    b.hess_wwbar.col(j) = 0.5 * ((brp.grad_w - brm.grad_w) / (2 * hr) +
                                 I * (bip.grad_w - bim.grad_w) / (2 * hi));
  }

  b.hess_xx = ((b.hess_xx + b.hess_xx.transpose()) / 2.0).eval();
  b.hess_wwbar = ((b.hess_wwbar + b.hess_wwbar.adjoint()) / 2.0).eval();
  return b;
}

namespace {

class QuadraticSeparable final : public TorusPotential {
 public:
  QuadraticSeparable(int k, int m, Eigen::MatrixXd A, PotentialOptions opts)
      : TorusPotential(k, m, std::move(opts)), A_(std::move(A)) {
    if (A_.rows() != k || A_.cols() != k)
      throw InvalidSpecError("quadratic matrix must be k x k");
    if (!A_.isApprox(A_.transpose(), 1e-12))
      throw InvalidSpecError("quadratic matrix must be symmetric");
  }

  std::string family() const override { return "quadratic_separable"; }
  bool box_supported() const override { return true; }

  std::unique_ptr<TorusPotential> with_offset(double c) const override {
    PotentialOptions o = opts();
    o.offset += c;
    return std::make_unique<QuadraticSeparable>(k(), m(), A_, o);
  }

 protected:
  double value_impl(const Eigen::VectorXd& x,
                    const Eigen::VectorXcd& w) const override {
    return 0.5 * x.dot(A_ * x) + w.squaredNorm();
  }

  DerivativeBundle analytic_bundle(const Eigen::VectorXd& x,
                                   const Eigen::VectorXcd& w) const override {
    DerivativeBundle b;
    b.value = value_impl(x, w);
    b.grad_x = A_ * x;
    b.hess_xx = A_;
    b.grad_w = w.conjugate();
    b.hess_wwbar = Eigen::MatrixXcd::Identity(m(), m());
    b.hess_xwbar = Eigen::MatrixXcd::Zero(k(), m());
    return b;
  }

 private:
  Eigen::MatrixXd A_;
};

// log(1 + sum e^(2 x_i) + |w|^2); m = 0 gives the pure toric chart.
class ProjectiveModel : public TorusPotential {
 public:
  ProjectiveModel(int k, int m, PotentialOptions opts)
      : TorusPotential(k, m, std::move(opts)) {}

  std::string family() const override { return "projective_model"; }

  std::unique_ptr<TorusPotential> with_offset(double c) const override {
    PotentialOptions o = opts();
    o.offset += c;
    auto out = std::make_unique<ProjectiveModel>(k(), m(), o);
    return out;
  }

 protected:
  double value_impl(const Eigen::VectorXd& x,
                    const Eigen::VectorXcd& w) const override {
    return std::log(s_total(x, w));
  }

  DerivativeBundle analytic_bundle(const Eigen::VectorXd& x,
                                   const Eigen::VectorXcd& w) const override {
    const double S = s_total(x, w);
    const Eigen::VectorXd u = (2.0 * x).array().exp();
    DerivativeBundle b;
    b.value = std::log(S);
    b.grad_x = 2.0 * u / S;
    b.hess_xx = 4.0 * (Eigen::MatrixXd(u.asDiagonal()) / S -
                       u * u.transpose() / (S * S));
    b.grad_w = w.conjugate() / S;
    b.hess_wwbar = Eigen::MatrixXcd::Identity(m(), m()) / S -
                   w.conjugate() * w.transpose() / (S * S);
    b.hess_xwbar = -2.0 * u.cast<std::complex<double>>() * w.transpose() /
                   (S * S);
    return b;
  }

 private:
  double s_total(const Eigen::VectorXd& x, const Eigen::VectorXcd& w) const {
    return 1.0 + (2.0 * x).array().exp().sum() + w.squaredNorm();
  }
};

class ToricFs final : public ProjectiveModel {
 public:
  ToricFs(int k, PotentialOptions opts) : ProjectiveModel(k, 0, std::move(opts)) {}

  std::string family() const override { return "toric_fs"; }

  std::unique_ptr<TorusPotential> with_offset(double c) const override {
    PotentialOptions o = opts();
    o.offset += c;
    return std::make_unique<ToricFs>(k(), o);
  }
};

}  // namespace

std::unique_ptr<TorusPotential> make_quadratic_separable(
    int k, int m, const Eigen::MatrixXd& A, const PotentialOptions& opts) {
  return std::make_unique<QuadraticSeparable>(k, m, A, opts);
}

std::unique_ptr<TorusPotential> make_projective_model(
    int k, int m, const PotentialOptions& opts) {
  return std::make_unique<ProjectiveModel>(k, m, opts);
}

std::unique_ptr<TorusPotential> make_toric_fs(int k,
                                              const PotentialOptions& opts) {
  return std::make_unique<ToricFs>(k, opts);
}

const std::vector<FamilyDescriptor>& builtin_catalog() {
  static const std::vector<FamilyDescriptor> catalog = {
      {"quadratic_separable",
       "x'Ax/2 + |w|^2 with symmetric positive definite A; box-supported",
       "A: k x k symmetric PD (default identity); offset"},
      {"projective_model",
       "log(1 + sum_i e^(2 x_i) + |w|^2); decaying density", "offset"},
      {"toric_fs", "log(1 + sum_i e^(2 x_i)); m = 0", "offset"},
  };
  return catalog;
}

std::unique_ptr<TorusPotential> make_builtin(
    const std::string& id, int k, int m, const PotentialOptions& opts,
    const std::optional<Eigen::MatrixXd>& A) {
  if (id == "quadratic_separable")
    return make_quadratic_separable(
        k, m, A.value_or(Eigen::MatrixXd::Identity(k, k)), opts);
  if (id == "projective_model") return make_projective_model(k, m, opts);
  if (id == "toric_fs") {
    if (m != 0) throw InvalidSpecError("toric_fs needs m = 0");
    return make_toric_fs(k, opts);
  }
  throw InvalidSpecError("unknown potential family: " + id);
}

MixedHessian mixed_hessian(const DerivativeBundle& b) {
  const Eigen::Index k = b.hess_xx.rows();
  const Eigen::Index m = b.hess_wwbar.rows();
  MixedHessian out;
  out.matrix.resize(k + m, k + m);
  out.matrix.topLeftCorner(k, k) = b.hess_xx.cast<std::complex<double>>();
  out.matrix.topRightCorner(k, m) = b.hess_xwbar;
  out.matrix.bottomLeftCorner(m, k) = b.hess_xwbar.adjoint();
  out.matrix.bottomRightCorner(m, m) = b.hess_wwbar;
  const std::complex<double> d = minors::det(out.matrix);
  if (std::abs(d.imag()) > 1e-12 * std::max(1.0, std::abs(d.real())))
    throw Error("mixed hessian determinant has a non-real residue");
  out.det = d.real();
  return out;
}

MixedHessian mixed_hessian(const TorusPotential& P, const Eigen::VectorXd& x,
                           const Eigen::VectorXcd& w) {
  return mixed_hessian(P.eval_bundle(x, w));
}

}  // namespace orbitlab
