#pragma once

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <string>
#include <vector>

#include "orbitlab/errors.hpp"

namespace orbitlab::minors {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Dense square matrix over exact rationals, row-major.
class RationalMatrix {
 public:
  explicit RationalMatrix(Eigen::Index n);
  RationalMatrix(std::initializer_list<std::initializer_list<long long>> rows);

  static RationalMatrix from_int(const Eigen::MatrixXi& m);
  static RationalMatrix identity(Eigen::Index n);

  Eigen::Index n() const { return n_; }
  Rational& operator()(Eigen::Index i, Eigen::Index j) {
    return data_[static_cast<size_t>(i * n_ + j)];
  }
  const Rational& operator()(Eigen::Index i, Eigen::Index j) const {
    return data_[static_cast<size_t>(i * n_ + j)];
  }

  RationalMatrix transpose() const;
  RationalMatrix operator*(const RationalMatrix& rhs) const;

 private:
  Eigen::Index n_ = 0;
  std::vector<Rational> data_;
};

// Rows/columns to delete, 1-based. alphas[i] pairs with betas[i].
struct MinorSpec {
  std::vector<int> alphas;
  std::vector<int> betas;

  int l() const { return static_cast<int>(alphas.size()); }
  // Throws InvalidSpecError unless both lists have equal length l <= n,
  // all indices in [1, n], and no repeats within a list.
  void validate(Eigen::Index n) const;
  bool ascending() const;
};

// Determinants. Exact mode runs fraction-free (Bareiss) elimination on a
// denominator-cleared integer copy; float modes run partial-pivot LU.
Rational det(const RationalMatrix& m);
double det(const Eigen::MatrixXd& m);
std::complex<double> det(const Eigen::MatrixXcd& m);

// Minor after deleting the listed rows and columns. Empty spec gives det(m);
// deleting everything gives 1.
Rational multi_minor(const RationalMatrix& m, const MinorSpec& spec);
double multi_minor(const Eigen::MatrixXd& m, const MinorSpec& spec);

// Signed cofactor matrix C with C(i,j) = (-1)^(i+j) * minor(i,j).
RationalMatrix cofactor_matrix(const RationalMatrix& m);
Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& m);

// sum over s in S_l of sgn(s) * prod_i minor(alpha_{s(i)}, beta_i).
// Requires 1 <= l <= 8 (factorial guard). Indices may be unsorted.
Rational perm_minor_sum(const RationalMatrix& m, const MinorSpec& spec);
double perm_minor_sum(const Eigen::MatrixXd& m, const MinorSpec& spec);

template <typename Scalar>
struct IdentityReport {
  Scalar lhs{};  // perm_minor_sum
  Scalar rhs{};  // det^(l-1) * multi_minor
  bool pass = false;
};

// Checks perm_minor_sum == det^(l-1) * multi_minor for an ascending spec.
// Exact mode demands equality; float mode compares with relative tolerance.
IdentityReport<Rational> verify_minor_identity(const RationalMatrix& m,
                                               const MinorSpec& spec);
IdentityReport<double> verify_minor_identity(const Eigen::MatrixXd& m,
                                             const MinorSpec& spec,
                                             double rel_tol = 1e-10);

}  // namespace orbitlab::minors
