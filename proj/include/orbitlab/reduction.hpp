#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "orbitlab/legendre.hpp"
#include "orbitlab/potentials.hpp"

namespace orbitlab::reduction {

using legendre::NewtonOptions;

// Momentum coordinates of (x, w): the x-gradient of the potential.
Eigen::VectorXd momentum_map(const TorusPotential& P, const Eigen::VectorXd& x,
                             const Eigen::VectorXcd& w);

// Local matrix of the reduced Kahler form at momentum level q, together with
// the signed fiber volume density.
struct ReducedForm {
  Eigen::VectorXd q;
  Eigen::VectorXcd w;
  Eigen::MatrixXcd sigma;  // -phi*_{w wbar}(q, w), Hermitian PD on interior
  double sigma_m = 0.0;    // det phi*_{w wbar}(q, w), signed; 1 when m = 0
};

ReducedForm reduced_form(
    const TorusPotential& P, const Eigen::VectorXd& q,
    const Eigen::VectorXcd& w, const NewtonOptions& opts = {},
    const std::optional<Eigen::VectorXd>& initial_guess = std::nullopt);

// Three routes to the same mixed-Hessian determinant at one point:
// direct block determinant, the reduction path (-1)^m sigma_m det hess_xx,
// and the Schur complement det(C - B^H H^{-1} B) det(H).
struct FactorizationReport {
  Eigen::VectorXd x;
  Eigen::VectorXcd w;
  double lhs = 0.0;      // det of the mixed Hessian
  double rhs = 0.0;      // reduction path
  double schur = 0.0;    // Schur oracle
  double rel_err_lhs_rhs = 0.0;
  double rel_err_lhs_schur = 0.0;
  double rel_err_rhs_schur = 0.0;
  bool pass = false;
};

FactorizationReport verify_factorization(const TorusPotential& P,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXcd& w, double tol,
                                         const NewtonOptions& opts = {});

// Numerical transcription of the l-indexed minor expansion of det(sigma)
// in terms of the blocks H, B, C at (x, w), against the direct determinant
// through the conjugate route. Small dimensions only (m <= 3, k <= 3).
struct ExpansionReport {
  std::complex<double> expansion;
  double direct = 0.0;
  double discrepancy = 0.0;  // |expansion - direct|
};

ExpansionReport minor_expansion_crosscheck(const TorusPotential& P,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXcd& w,
                                           const NewtonOptions& opts = {});

}  // namespace orbitlab::reduction
