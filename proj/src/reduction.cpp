#include "orbitlab/reduction.hpp"

#include <cmath>
#include <vector>

#include "orbitlab/minors.hpp"

namespace orbitlab::reduction {

namespace {

double real_checked(std::complex<double> z, const char* what) {
  if (std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z.real())))
    throw SolverError(std::string(what) + " has a non-negligible imaginary part");
  return z.real();
}

// All size-l subsets of {1, ..., n}, ascending, as 1-based index lists.
std::vector<std::vector<int>> subsets(int n, int l) {
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

}  // namespace

Eigen::VectorXd momentum_map(const TorusPotential& P, const Eigen::VectorXd& x,
                             const Eigen::VectorXcd& w) {
  return P.eval_bundle(x, w).grad_x;
}

ReducedForm reduced_form(const TorusPotential& P, const Eigen::VectorXd& q,
                         const Eigen::VectorXcd& w, const NewtonOptions& opts,
                         const std::optional<Eigen::VectorXd>& initial_guess) {
  ReducedForm rf;
  rf.q = q;
  rf.w = w;
  const Eigen::MatrixXcd conj_hess =
      legendre::conjugate_w_hessian(P, q, w, opts, initial_guess);
  rf.sigma = -conj_hess;
  rf.sigma_m = real_checked(minors::det(conj_hess), "sigma_m");
  return rf;
}

FactorizationReport verify_factorization(const TorusPotential& P,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXcd& w, double tol,
                                         const NewtonOptions& opts) {
  if (tol <= 0) throw InvalidSpecError("tolerance must be positive");
  FactorizationReport report;
  report.x = x;
  report.w = w;

  const DerivativeBundle b = P.eval_bundle(x, w);
  report.lhs = mixed_hessian(b).det;

  const double det_hess_xx = minors::det(b.hess_xx);
  const ReducedForm rf = reduced_form(P, b.grad_x, w, opts, x);
  const double sign = (P.m() % 2 == 0) ? 1.0 : -1.0;
  report.rhs = sign * rf.sigma_m * det_hess_xx;

  const Eigen::MatrixXcd hinv_b =
      b.hess_xx.llt().solve(b.hess_xwbar.real()).eval().cast<std::complex<double>>() +
      std::complex<double>(0, 1) *
          b.hess_xx.llt().solve(b.hess_xwbar.imag()).eval().cast<std::complex<double>>();
  const Eigen::MatrixXcd schur_block =
      b.hess_wwbar - b.hess_xwbar.adjoint() * hinv_b;
  report.schur =
      real_checked(minors::det(schur_block), "Schur determinant") * det_hess_xx;

  const double scale = std::max(1.0, std::abs(report.lhs));
  report.rel_err_lhs_rhs = std::abs(report.lhs - report.rhs) / scale;
  report.rel_err_lhs_schur = std::abs(report.lhs - report.schur) / scale;
  report.rel_err_rhs_schur = std::abs(report.rhs - report.schur) / scale;
  report.pass = report.rel_err_lhs_rhs <= tol &&
                report.rel_err_lhs_schur <= tol &&
                report.rel_err_rhs_schur <= tol;
  return report;
}

ExpansionReport minor_expansion_crosscheck(const TorusPotential& P,
                                           const Eigen::VectorXd& x,
                                           const Eigen::VectorXcd& w,
                                           const NewtonOptions& opts) {
  const int k = P.k();
  const int m = P.m();
  if (k > 3 || m > 3)
    throw DimensionGuardError("minor expansion crosscheck needs k, m <= 3");

  const DerivativeBundle bundle = P.eval_bundle(x, w);
  const Eigen::MatrixXd& H = bundle.hess_xx;
  const Eigen::MatrixXcd& B = bundle.hess_xwbar;
  const Eigen::MatrixXcd& C = bundle.hess_wwbar;
  const Eigen::MatrixXcd conjB = B.conjugate();
  const double D = minors::det(H);

  // det(C - B^H H^{-1} B) expanded by multilinearity over replaced rows,
  // with the inverse-Hessian minors rewritten through perm_minor_sum by the
  // minor identity and Jacobi's complementary-minor formula.
  std::complex<double> expansion = minors::det(C);
  for (int l = 1; l <= std::min(k, m); ++l) {
    const double sign_l = (l % 2 == 0) ? 1.0 : -1.0;
    const double dinv_l = std::pow(D, -l);
    std::complex<double> level_total = 0.0;
    for (const auto& J : subsets(m, l)) {
      for (const auto& Bp : subsets(k, l)) {
        // Rows of C indexed by J replaced with the matching rows of B.
        Eigen::MatrixXcd replaced = C;
        for (int r = 0; r < l; ++r)
          replaced.row(J[static_cast<size_t>(r)] - 1) =
              B.row(Bp[static_cast<size_t>(r)] - 1);
        const std::complex<double> r_det = minors::det(replaced);
        if (r_det == 0.0) continue;
        for (const auto& Ap : subsets(k, l)) {
          Eigen::MatrixXcd small(l, l);
          for (int r = 0; r < l; ++r)
            for (int c = 0; c < l; ++c)
              small(r, c) = conjB(Ap[static_cast<size_t>(r)] - 1,
                                  J[static_cast<size_t>(c)] - 1);
          int index_sum = 0;
          for (int r = 0; r < l; ++r)
            index_sum += Ap[static_cast<size_t>(r)] + Bp[static_cast<size_t>(r)];
          const double sign_idx = (index_sum % 2 == 0) ? 1.0 : -1.0;
          const double pms =
              minors::perm_minor_sum(H, minors::MinorSpec{Ap, Bp});
          level_total += r_det * minors::det(small) * sign_idx * pms;
        }
      }
    }
    expansion += sign_l * dinv_l * level_total;
  }

  ExpansionReport report;
  report.expansion = expansion;
  const Eigen::MatrixXcd conj_hess =
      legendre::conjugate_w_hessian(P, bundle.grad_x, w, opts, x);
  report.direct = real_checked(minors::det((-conj_hess).eval()),
                               "direct reduced determinant");
  report.discrepancy = std::abs(expansion - std::complex<double>(report.direct));
  return report;
}

}  // namespace orbitlab::reduction
