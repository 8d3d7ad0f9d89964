#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "orbitlab/grid.hpp"
#include "orbitlab/potentials.hpp"

namespace orbitlab::legendre {

struct NewtonOptions {
  double tol = 1e-10;        // sup-norm residual on grad_x phi - p
  int max_iters = 100;
  double armijo_c = 1e-4;
  // Rejects p closer than margin_rel * axis width to the sampled momentum
  // bounds of the working box. 0 disables the a-priori check; the solver
  // still reports a domain error when the argmax pins to the box boundary.
  double margin_rel = 1e-3;
};

struct ConjugateResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
  int iters = 0;
  double residual = 0.0;
};

// Legendre conjugate sup_x (x . p - phi(x, w)) by damped Newton from x = 0.
ConjugateResult conjugate_at(
    const TorusPotential& P, const Eigen::VectorXd& p,
    const Eigen::VectorXcd& w, const NewtonOptions& opts = {},
    const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt);

// The conjugate's p-gradient, i.e. the argmax of the dual problem.
Eigen::VectorXd grad_p_conjugate(
    const TorusPotential& P, const Eigen::VectorXd& p,
    const Eigen::VectorXcd& w, const NewtonOptions& opts = {},
    const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt);

struct WDerivativeReport {
  Eigen::MatrixXcd fd;       // k x m, central differences of the argmax
  Eigen::MatrixXcd formula;  // -hess_xx^{-1} * conj(hess_xwbar)
  double max_abs_diff = 0.0;
};

// Checks d/dw_j of the argmax against -H^{-1} grad_x phi_{w_j}.
WDerivativeReport conjugate_w_derivative_identity_check(
    const TorusPotential& P, const Eigen::VectorXd& p,
    const Eigen::VectorXcd& w, const NewtonOptions& opts = {},
    double h_rel = 1e-4);

// Second Wirtinger derivative matrix of the conjugate in w at fixed p:
// phi*_{w wbar}(p, w) = -hess_wwbar + hess_xwbar^H H^{-1} hess_xwbar at the
// argmax. Hermitian negative definite at interior momenta.
Eigen::MatrixXcd conjugate_w_hessian(
    const TorusPotential& P, const Eigen::VectorXd& p,
    const Eigen::VectorXcd& w, const NewtonOptions& opts = {},
    const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt);

// Grid Legendre transform of convex 1-D samples by a monotone-slope sweep.
// Output nodes default to a uniform grid over the induced slope range with
// the input node count. Rejects non-convex samples.
GridFunction1D discrete_llt(const GridFunction1D& f);
GridFunction1D discrete_llt(const GridFunction1D& f, const Grid1D& out_grid);

struct MomentImage {
  Eigen::MatrixXd samples;   // one momentum per row
  Eigen::VectorXd lower;     // per-axis bounds over the samples
  Eigen::VectorXd upper;
  // k = 1: the two interval ends; k = 2: convex hull, counter-clockwise.
  std::vector<Eigen::VectorXd> hull;

  bool contains(const Eigen::VectorXd& p, double margin = 0.0) const;
};

// Momentum samples over the tensor grid axis_grid^k and their hull.
// k >= 3 hulls are out of desk-scale scope and raise the dimension guard.
MomentImage moment_image(const TorusPotential& P, const Eigen::VectorXcd& w,
                         const Grid1D& axis_grid);

// Per-axis momentum bounds over the working box corners.
void momentum_axis_bounds(const TorusPotential& P, const Eigen::VectorXcd& w,
                          Eigen::VectorXd& lo, Eigen::VectorXd& hi);

}  // namespace orbitlab::legendre
