#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/errors.hpp"

namespace orbitlab {

// Working box |x_i| <= radius_x, |Re w_j|, |Im w_j| <= radius_w.
struct DomainBox {
  double radius_x = 6.0;
  double radius_w = 2.0;
};

enum class DerivativeMode { analytic, finite_difference };

// Value and derivatives at one point. Complex w derivatives follow the
// d/dw = (d/dRe - i d/dIm)/2 convention.
struct DerivativeBundle {
  double value = 0.0;
  Eigen::VectorXd grad_x;      // k
  Eigen::MatrixXd hess_xx;     // k x k, symmetric positive definite
  Eigen::VectorXcd grad_w;     // m
  Eigen::MatrixXcd hess_wwbar;  // m x m, Hermitian
  Eigen::MatrixXcd hess_xwbar;  // k x m
};

struct PotentialOptions {
  DomainBox domain;
  DerivativeMode mode = DerivativeMode::analytic;
  double fd_step = 1e-5;  // relative; actual step is fd_step * (1 + |coord|)
  double offset = 0.0;    // additive constant
};

// Torus-invariant potential phi(x, w) on the working box, strictly convex
// in x. Immutable after construction.
class TorusPotential {
 public:
  virtual ~TorusPotential() = default;

  int k() const { return k_; }
  int m() const { return m_; }
  const DomainBox& domain() const { return opts_.domain; }
  DerivativeMode mode() const { return opts_.mode; }
  double offset() const { return opts_.offset; }
  virtual std::string family() const = 0;

  // True if the pushforward measure is supported on the whole box (no decay
  // requirement at the boundary, e.g. the quadratic family).
  virtual bool box_supported() const { return false; }

  double value(const Eigen::VectorXd& x, const Eigen::VectorXcd& w) const;
  DerivativeBundle eval_bundle(const Eigen::VectorXd& x,
                               const Eigen::VectorXcd& w) const;

  // Same family and parameters with the additive constant shifted by c.
  virtual std::unique_ptr<TorusPotential> with_offset(double c) const = 0;

 protected:
  TorusPotential(int k, int m, PotentialOptions opts);
  virtual double value_impl(const Eigen::VectorXd& x,
                            const Eigen::VectorXcd& w) const = 0;
  virtual DerivativeBundle analytic_bundle(const Eigen::VectorXd& x,
                                           const Eigen::VectorXcd& w) const = 0;
  const PotentialOptions& opts() const { return opts_; }

 private:
  void check_domain(const Eigen::VectorXd& x, const Eigen::VectorXcd& w) const;
  DerivativeBundle fd_bundle(const Eigen::VectorXd& x,
                             const Eigen::VectorXcd& w) const;

  int k_;
  int m_;
  PotentialOptions opts_;
};

// phi = x' A x / 2 + |w|^2 + offset, A symmetric (PD enforced at eval time).
std::unique_ptr<TorusPotential> make_quadratic_separable(
    int k, int m, const Eigen::MatrixXd& A, const PotentialOptions& opts = {});

// phi = log(1 + sum_i e^(2 x_i) + |w|^2) + offset.
std::unique_ptr<TorusPotential> make_projective_model(
    int k, int m, const PotentialOptions& opts = {});

// phi = log(1 + sum_i e^(2 x_i)) + offset; m = 0.
std::unique_ptr<TorusPotential> make_toric_fs(int k,
                                              const PotentialOptions& opts = {});

struct FamilyDescriptor {
  std::string id;
  std::string description;
  std::string parameters;
};

const std::vector<FamilyDescriptor>& builtin_catalog();

// Factory by family id; A is required for quadratic_separable (defaults to
// identity when absent). Unknown ids raise InvalidSpecError.
std::unique_ptr<TorusPotential> make_builtin(
    const std::string& id, int k, int m, const PotentialOptions& opts = {},
    const std::optional<Eigen::MatrixXd>& A = std::nullopt);

// Full (k+m) x (k+m) Hermitian block matrix [[hess_xx, hess_xwbar],
// [hess_xwbar^H, hess_wwbar]] and its (real) determinant.
struct MixedHessian {
  Eigen::MatrixXcd matrix;
  double det = 0.0;
};

MixedHessian mixed_hessian(const TorusPotential& P, const Eigen::VectorXd& x,
                           const Eigen::VectorXcd& w);
MixedHessian mixed_hessian(const DerivativeBundle& b);

}  // namespace orbitlab
