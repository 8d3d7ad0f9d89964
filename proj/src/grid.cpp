#include "orbitlab/grid.hpp"

#include <cmath>

namespace orbitlab {

Grid1D::Grid1D(Eigen::VectorXd nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw InvalidSpecError("grid needs at least 2 nodes");
  for (Eigen::Index i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_(i) < nodes_(i + 1)))
      throw InvalidSpecError("grid nodes must be strictly ascending");
  }
  if (!nodes_.allFinite()) throw InvalidSpecError("grid nodes must be finite");
}

Grid1D Grid1D::uniform(double lo, double hi, Eigen::Index n) {
  if (n < 2) throw InvalidSpecError("grid needs at least 2 nodes");
  if (!(lo < hi)) throw InvalidSpecError("grid range must have lo < hi");
  return Grid1D(Eigen::VectorXd::LinSpaced(n, lo, hi));
}

Eigen::Index Grid1D::segment(double x) const {
  if (x < lo() || x > hi()) throw DomainError("point outside grid range");
  Eigen::Index a = 0, b = nodes_.size() - 1;
  while (b - a > 1) {
    Eigen::Index mid = (a + b) / 2;
    (nodes_(mid) <= x ? a : b) = mid;
  }
  return a;
}

GridFunction1D::GridFunction1D(Grid1D g, Eigen::VectorXd v)
    : grid(std::move(g)), values(std::move(v)) {
  if (grid.size() != values.size())
    throw InvalidSpecError("grid/value size mismatch");
}

double GridFunction1D::interp(double x) const {
  const Eigen::Index i = grid.segment(x);
  const double x0 = grid.nodes()(i), x1 = grid.nodes()(i + 1);
  const double t = (x - x0) / (x1 - x0);
  return (1.0 - t) * values(i) + t * values(i + 1);
}

Eigen::VectorXd trapezoid_weights(const Grid1D& grid) {
  const Eigen::Index n = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = grid.nodes()(i + 1) - grid.nodes()(i);
    w(i) += 0.5 * h;
    w(i + 1) += 0.5 * h;
  }
  return w;
}

double trapezoid(const Grid1D& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.size())
    throw InvalidSpecError("grid/value size mismatch");
  return trapezoid_weights(grid).dot(values);
}

Eigen::VectorXd cumtrapz(const Grid1D& grid, const Eigen::VectorXd& values) {
  if (values.size() != grid.size())
    throw InvalidSpecError("grid/value size mismatch");
  Eigen::VectorXd out(grid.size());
  out(0) = 0.0;
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    const double h = grid.nodes()(i) - grid.nodes()(i - 1);
    out(i) = out(i - 1) + 0.5 * h * (values(i) + values(i - 1));
  }
  return out;
}

TensorGrid::TensorGrid(std::vector<Grid1D> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw InvalidSpecError("tensor grid needs at least 1 axis");
  size_ = 1;
  for (const auto& ax : axes_) {
    axis_weights_.push_back(trapezoid_weights(ax));
    size_ *= ax.size();
  }
}

std::vector<Eigen::Index> TensorGrid::unravel(Eigen::Index flat) const {
  std::vector<Eigen::Index> idx(axes_.size());
  for (int a = dims() - 1; a >= 0; --a) {
    const Eigen::Index n = axes_[static_cast<size_t>(a)].size();
    idx[static_cast<size_t>(a)] = flat % n;
    flat /= n;
  }
  return idx;
}

Eigen::VectorXd TensorGrid::point(Eigen::Index flat) const {
  const auto idx = unravel(flat);
  Eigen::VectorXd p(dims());
  for (int a = 0; a < dims(); ++a)
    p(a) = axes_[static_cast<size_t>(a)].nodes()(idx[static_cast<size_t>(a)]);
  return p;
}

double TensorGrid::weight(Eigen::Index flat) const {
  const auto idx = unravel(flat);
  double w = 1.0;
  for (int a = 0; a < dims(); ++a)
    w *= axis_weights_[static_cast<size_t>(a)](idx[static_cast<size_t>(a)]);
  return w;
}

bool TensorGrid::on_boundary(Eigen::Index flat) const {
  const auto idx = unravel(flat);
  for (int a = 0; a < dims(); ++a) {
    const Eigen::Index i = idx[static_cast<size_t>(a)];
    if (i == 0 || i == axes_[static_cast<size_t>(a)].size() - 1) return true;
  }
  return false;
}

}  // namespace orbitlab
