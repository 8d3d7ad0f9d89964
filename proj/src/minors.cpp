#include "orbitlab/minors.hpp"

#include <algorithm>
#include <numeric>

namespace orbitlab::minors {

namespace {

Eigen::Index m_rows(const RationalMatrix& m) { return m.n(); }
Eigen::Index m_rows(const Eigen::MatrixXd& m) { return m.rows(); }

int inversion_parity(const std::vector<int>& perm) {
  int inv = 0;
  for (size_t i = 0; i < perm.size(); ++i)
    for (size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) ++inv;
  return (inv % 2 == 0) ? 1 : -1;
}

// Fraction-free elimination; a is row-major and destroyed. Exact over BigInt.
BigInt bareiss_det(std::vector<BigInt>& a, Eigen::Index n) {
  if (n == 0) return 1;
  BigInt prev = 1;
  int sign = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a[static_cast<size_t>(k * n + k)] == 0) {
      Eigen::Index r = k + 1;
      while (r < n && a[static_cast<size_t>(r * n + k)] == 0) ++r;
      if (r == n) return 0;
      for (Eigen::Index j = k; j < n; ++j)
        std::swap(a[static_cast<size_t>(k * n + j)],
                  a[static_cast<size_t>(r * n + j)]);
      sign = -sign;
    }
    const BigInt pivot = a[static_cast<size_t>(k * n + k)];
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        BigInt& t = a[static_cast<size_t>(i * n + j)];
        t = (t * pivot - a[static_cast<size_t>(i * n + k)] *
                             a[static_cast<size_t>(k * n + j)]) /
            prev;
      }
    }
    prev = pivot;
  }
  return sign * a[static_cast<size_t>((n - 1) * n + (n - 1))];
}

// Kept rows/cols (0-based, ascending) after deleting a validated spec.
std::vector<Eigen::Index> kept_indices(Eigen::Index n,
                                       const std::vector<int>& deleted) {
  std::vector<bool> drop(static_cast<size_t>(n), false);
  for (int d : deleted) drop[static_cast<size_t>(d - 1)] = true;
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<size_t>(n) - deleted.size());
  for (Eigen::Index i = 0; i < n; ++i)
    if (!drop[static_cast<size_t>(i)]) keep.push_back(i);
  return keep;
}

Rational submatrix_det(const RationalMatrix& m,
                       const std::vector<Eigen::Index>& rows,
                       const std::vector<Eigen::Index>& cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return 1;
  // Clear denominators row by row so elimination stays integral.
  std::vector<BigInt> a(static_cast<size_t>(n * n));
  Rational scale = 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    BigInt row_lcm = 1;
    for (Eigen::Index j = 0; j < n; ++j)
      row_lcm = lcm(row_lcm, denominator(m(rows[static_cast<size_t>(i)],
                                           cols[static_cast<size_t>(j)])));
    for (Eigen::Index j = 0; j < n; ++j) {
      const Rational& q =
          m(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
      a[static_cast<size_t>(i * n + j)] =
          numerator(q) * (row_lcm / denominator(q));
    }
    scale *= Rational(row_lcm);
  }
  return Rational(bareiss_det(a, n)) / scale;
}

double submatrix_det(const Eigen::MatrixXd& m,
                     const std::vector<Eigen::Index>& rows,
                     const std::vector<Eigen::Index>& cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) return 1.0;
  Eigen::MatrixXd sub(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      sub(i, j) = m(rows[static_cast<size_t>(i)], cols[static_cast<size_t>(j)]);
  return det(sub);
}

template <typename Matrix, typename Scalar>
Scalar perm_minor_sum_impl(const Matrix& m, const MinorSpec& spec) {
  spec.validate(m_rows(m));
  const int l = spec.l();
  if (l < 1) throw InvalidSpecError("perm_minor_sum needs l >= 1");
  if (l > 8) throw ComplexityGuardError("perm_minor_sum guard: l > 8");

  // table(a, b) = single minor deleting row alphas[a], column betas[b].
  std::vector<Scalar> table(static_cast<size_t>(l * l));
  for (int a = 0; a < l; ++a)
    for (int b = 0; b < l; ++b) {
      MinorSpec single{{spec.alphas[static_cast<size_t>(a)]},
                       {spec.betas[static_cast<size_t>(b)]}};
      table[static_cast<size_t>(a * l + b)] = multi_minor(m, single);
    }

  std::vector<int> perm(static_cast<size_t>(l));
  std::iota(perm.begin(), perm.end(), 0);
  Scalar sum = 0;
  do {
    Scalar term = table[static_cast<size_t>(perm[0] * l + 0)];
    for (int i = 1; i < l; ++i)
      term *= table[static_cast<size_t>(perm[static_cast<size_t>(i)] * l + i)];
    if (inversion_parity(perm) > 0)
      sum += term;
    else
      sum -= term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

template <typename Matrix, typename Scalar>
IdentityReport<Scalar> verify_identity_impl(const Matrix& m,
                                            const MinorSpec& spec) {
  spec.validate(m_rows(m));
  if (!spec.ascending())
    throw InvalidSpecError("identity check needs ascending indices");
  IdentityReport<Scalar> report;
  report.lhs = perm_minor_sum_impl<Matrix, Scalar>(m, spec);
  const MinorSpec whole{{}, {}};
  Scalar d = multi_minor(m, whole);
  Scalar dpow = 1;
  for (int i = 1; i < spec.l(); ++i) dpow *= d;
  report.rhs = dpow * multi_minor(m, spec);
  return report;
}

}  // namespace

RationalMatrix::RationalMatrix(Eigen::Index n)
    : n_(n), data_(static_cast<size_t>(n * n)) {
  if (n < 0) throw InvalidSpecError("negative matrix size");
}

RationalMatrix::RationalMatrix(
    std::initializer_list<std::initializer_list<long long>> rows)
    : RationalMatrix(static_cast<Eigen::Index>(rows.size())) {
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    if (static_cast<Eigen::Index>(row.size()) != n_)
      throw InvalidSpecError("matrix rows must be square");
    Eigen::Index j = 0;
    for (long long v : row) (*this)(i, j++) = v;
    ++i;
  }
}

RationalMatrix RationalMatrix::from_int(const Eigen::MatrixXi& m) {
  if (m.rows() != m.cols()) throw InvalidSpecError("matrix must be square");
  RationalMatrix out(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  return out;
}

RationalMatrix RationalMatrix::identity(Eigen::Index n) {
  RationalMatrix out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i, i) = 1;
  return out;
}

RationalMatrix RationalMatrix::transpose() const {
  RationalMatrix out(n_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < n_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& rhs) const {
  if (rhs.n() != n_) throw InvalidSpecError("matrix size mismatch");
  RationalMatrix out(n_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < n_; ++j) {
      Rational acc = 0;
      for (Eigen::Index t = 0; t < n_; ++t) acc += (*this)(i, t) * rhs(t, j);
      out(i, j) = acc;
    }
  return out;
}

void MinorSpec::validate(Eigen::Index n) const {
  if (alphas.size() != betas.size())
    throw InvalidSpecError("minor spec needs matching row/column lists");
  if (static_cast<Eigen::Index>(alphas.size()) > n)
    throw InvalidSpecError("minor spec longer than matrix size");
  for (const auto* list : {&alphas, &betas}) {
    for (int v : *list)
      if (v < 1 || v > n) throw InvalidSpecError("minor index out of range");
    std::vector<int> sorted(*list);
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidSpecError("repeated minor index");
  }
}

bool MinorSpec::ascending() const {
  return std::is_sorted(alphas.begin(), alphas.end(),
                        std::less_equal<int>()) &&
         std::is_sorted(betas.begin(), betas.end(), std::less_equal<int>());
}

Rational det(const RationalMatrix& m) {
  std::vector<Eigen::Index> all(static_cast<size_t>(m.n()));
  std::iota(all.begin(), all.end(), 0);
  return submatrix_det(m, all, all);
}

double det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidSpecError("matrix must be square");
  if (m.rows() == 0) return 1.0;
  if (m.rows() == 1) return m(0, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
}

std::complex<double> det(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw InvalidSpecError("matrix must be square");
  if (m.rows() == 0) return {1.0, 0.0};
  if (m.rows() == 1) return m(0, 0);
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

Rational multi_minor(const RationalMatrix& m, const MinorSpec& spec) {
  spec.validate(m.n());
  return submatrix_det(m, kept_indices(m.n(), spec.alphas),
                       kept_indices(m.n(), spec.betas));
}

double multi_minor(const Eigen::MatrixXd& m, const MinorSpec& spec) {
  if (m.rows() != m.cols()) throw InvalidSpecError("matrix must be square");
  spec.validate(m.rows());
  return submatrix_det(m, kept_indices(m.rows(), spec.alphas),
                       kept_indices(m.rows(), spec.betas));
}

RationalMatrix cofactor_matrix(const RationalMatrix& m) {
  RationalMatrix out(m.n());
  for (Eigen::Index i = 0; i < m.n(); ++i)
    for (Eigen::Index j = 0; j < m.n(); ++j) {
      const MinorSpec spec{{static_cast<int>(i + 1)},
                           {static_cast<int>(j + 1)}};
      Rational v = multi_minor(m, spec);
      out(i, j) = ((i + j) % 2 == 0) ? v : -v;
    }
  return out;
}

Eigen::MatrixXd cofactor_matrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InvalidSpecError("matrix must be square");
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const MinorSpec spec{{static_cast<int>(i + 1)},
                           {static_cast<int>(j + 1)}};
      const double v = multi_minor(m, spec);
      out(i, j) = ((i + j) % 2 == 0) ? v : -v;
    }
  return out;
}

Rational perm_minor_sum(const RationalMatrix& m, const MinorSpec& spec) {
  return perm_minor_sum_impl<RationalMatrix, Rational>(m, spec);
}

double perm_minor_sum(const Eigen::MatrixXd& m, const MinorSpec& spec) {
  return perm_minor_sum_impl<Eigen::MatrixXd, double>(m, spec);
}

IdentityReport<Rational> verify_minor_identity(const RationalMatrix& m,
                                               const MinorSpec& spec) {
  auto report = verify_identity_impl<RationalMatrix, Rational>(m, spec);
  report.pass = (report.lhs == report.rhs);
  return report;
}

IdentityReport<double> verify_minor_identity(const Eigen::MatrixXd& m,
                                             const MinorSpec& spec,
                                             double rel_tol) {
  auto report = verify_identity_impl<Eigen::MatrixXd, double>(m, spec);
  const double scale =
      std::max({1.0, std::abs(report.lhs), std::abs(report.rhs)});
  report.pass = std::abs(report.lhs - report.rhs) <= rel_tol * scale;
  return report;
}

}  // namespace orbitlab::minors
