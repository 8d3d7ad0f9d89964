#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orbitlab/grid.hpp"
#include "orbitlab/legendre.hpp"
#include "orbitlab/potentials.hpp"

namespace orbitlab::measures {

using legendre::NewtonOptions;

// Positive continuous weight g on momentum space. Builtin shapes: constant,
// exponential of a linear form, and a 1-D interpolation table (clamped at
// the table ends). All carry a positive prefactor so g -> c*g is cheap.
class WeightFunction {
 public:
  static WeightFunction constant(double c = 1.0);
  static WeightFunction affine_exponential(const Eigen::VectorXd& a);
  static WeightFunction table(GridFunction1D samples);

  double operator()(const Eigen::VectorXd& p) const;
  // Same weight with the prefactor multiplied by s > 0.
  WeightFunction scaled(double s) const;
  // Throws InvalidSpecError if g <= 0 at any sample row (momenta as rows).
  void validate_on(const Eigen::MatrixXd& momentum_samples) const;
  std::string describe() const;

 private:
  enum class Kind { constant, affine_exponential, table };

  WeightFunction(Kind kind, double prefactor);

  Kind kind_;
  double prefactor_ = 1.0;
  Eigen::VectorXd a_;       // affine_exponential
  GridFunction1D samples_;  // table
};

// Nonnegative samples of a density over a tensor grid, with the matching
// quadrature weights.
struct DensityField {
  TensorGrid grid;
  Eigen::VectorXd values;
  Eigen::VectorXd quadrature_weights;
  std::string id;

  DensityField() = default;
  // Weights default to the grid's trapezoid weights. Negative values or a
  // size mismatch raise InvalidSpecError.
  DensityField(TensorGrid g, Eigen::VectorXd v, std::string id = "");

  double mass() const { return values.dot(quadrature_weights); }
};

// Weighted local volume density g(momentum) * det(mixed Hessian).
double ma_density(const TorusPotential& P, const WeightFunction& g,
                  const Eigen::VectorXd& x, const Eigen::VectorXcd& w);

// Orbit average of the density at fixed w: trapezoid quadrature of
// ma_density over x_grid. The grid must capture the mass: unless the
// potential is box-supported, the boundary density must not exceed
// boundary_rel_tol times the peak, else a TruncationError is raised.
double average_density(const TorusPotential& P, const WeightFunction& g,
                       const Eigen::VectorXcd& w, const Grid1D& x_grid,
                       double boundary_rel_tol = 1e-6);

// Conditional density of the orbit over w, evaluated through the reduced
// route: (-1)^m g(momentum) sigma_m(momentum, w) det hess_xx / mu_hat.
// The first form computes mu_hat = average_density on x_grid; the second
// takes a precomputed mu_hat (fast path for grid sweeps).
double conditional_density(const TorusPotential& P, const WeightFunction& g,
                           const Eigen::VectorXcd& w, const Eigen::VectorXd& x,
                           const Grid1D& x_grid,
                           const NewtonOptions& opts = {});
double conditional_density_at(const TorusPotential& P, const WeightFunction& g,
                              const Eigen::VectorXcd& w,
                              const Eigen::VectorXd& x, double mu_hat,
                              const NewtonOptions& opts = {});

// Samples of the conditional density over x_grid (k = 1).
DensityField conditional_field(const TorusPotential& P,
                               const WeightFunction& g,
                               const Eigen::VectorXcd& w, const Grid1D& x_grid,
                               const NewtonOptions& opts = {});

// |integral of the conditional density - 1| on x_grid.
double check_normalization(const TorusPotential& P, const WeightFunction& g,
                           const Eigen::VectorXcd& w, const Grid1D& x_grid,
                           const NewtonOptions& opts = {});

struct TestFunction {
  std::string id;
  std::function<double(const Eigen::VectorXd& x, const Eigen::VectorXcd& w)> f;
};

// Polynomial-times-Gaussian family for the disintegration check, k=1, m=1.
std::vector<TestFunction> default_test_suite();

struct DisintegrationReport {
  std::string f_id;
  double lhs = 0.0;        // joint quadrature of f against the density
  double rhs = 0.0;        // iterated: orbit integral then average
  double abs_error = 0.0;  // |lhs - rhs|
};

// Compares the joint integral of each test function with the iterated
// integral through conditional densities on the product grid. k=1, m=1;
// w_grid has two axes (Re w, Im w).
std::vector<DisintegrationReport> check_disintegration(
    const TorusPotential& P, const WeightFunction& g,
    const std::vector<TestFunction>& f_suite, const Grid1D& x_grid,
    const TensorGrid& w_grid, const NewtonOptions& opts = {});

// Uniform momentum grid spanning the image of x_grid under the momentum map
// at fixed w, shrunk inward by interior_frac of the span on each side.
Grid1D dh_momentum_grid(const TorusPotential& P, const Eigen::VectorXcd& w,
                        const Grid1D& x_grid, Eigen::Index n,
                        double interior_frac = 1e-7);

// Pushforward of the conditional density through the momentum map (k = 1):
// change-of-variables density  eta_w(x(p)) / hess_xx(x(p))  on p_grid, with
// an internal consistency assertion against the direct reduced formula
// (-1)^m g(p) sigma_m(p, w) / mu_hat.
DensityField dh_pushforward(const TorusPotential& P, const WeightFunction& g,
                            const Eigen::VectorXcd& w, const Grid1D& x_grid,
                            const Grid1D& p_grid,
                            const NewtonOptions& opts = {});

struct HistogramReport {
  Eigen::VectorXd bin_edges;     // n_bins + 1 momentum values
  Eigen::VectorXd counts;        // accepted samples per bin
  Eigen::VectorXd expected;      // predicted counts from the density
  double max_sigma_units = 0.0;  // worst |count - expected| / sigma
  bool pass = false;             // every bin within 3 sigma + 1 count
  std::int64_t accepted = 0;
  std::int64_t proposals = 0;
};

// Monte-Carlo oracle for the pushforward (k = 1): rejection-samples the
// orbit density over the x_grid range, bins the momenta, and compares with
// binomial predictions from the change-of-variables density.
HistogramReport dh_histogram(const TorusPotential& P, const WeightFunction& g,
                             const Eigen::VectorXcd& w, const Grid1D& x_grid,
                             std::int64_t n_samples, int n_bins,
                             std::uint64_t seed,
                             const NewtonOptions& opts = {});

}  // namespace orbitlab::measures
