#pragma once

#include <Eigen/Dense>
#include <vector>

#include "orbitlab/errors.hpp"

namespace orbitlab {

// Strictly ascending 1-D node set.
class Grid1D {
 public:
  Grid1D() = default;
  explicit Grid1D(Eigen::VectorXd nodes);

  static Grid1D uniform(double lo, double hi, Eigen::Index n);

  const Eigen::VectorXd& nodes() const { return nodes_; }
  Eigen::Index size() const { return nodes_.size(); }
  double lo() const { return nodes_(0); }
  double hi() const { return nodes_(nodes_.size() - 1); }

  // Index of the segment [nodes[i], nodes[i+1]] containing x.
  Eigen::Index segment(double x) const;

 private:
  Eigen::VectorXd nodes_;
};

// Samples of a function on a Grid1D.
struct GridFunction1D {
  Grid1D grid;
  Eigen::VectorXd values;

  GridFunction1D() = default;
  GridFunction1D(Grid1D g, Eigen::VectorXd v);

  double interp(double x) const;  // linear
};

// Composite trapezoid rule.
double trapezoid(const Grid1D& grid, const Eigen::VectorXd& values);
Eigen::VectorXd trapezoid_weights(const Grid1D& grid);
// Running integral from the left endpoint; result[0] = 0.
Eigen::VectorXd cumtrapz(const Grid1D& grid, const Eigen::VectorXd& values);

// Product of per-axis 1-D grids, iterated in odometer order (last axis fastest).
class TensorGrid {
 public:
  TensorGrid() = default;
  explicit TensorGrid(std::vector<Grid1D> axes);

  int dims() const { return static_cast<int>(axes_.size()); }
  const Grid1D& axis(int a) const { return axes_[static_cast<size_t>(a)]; }
  Eigen::Index size() const { return size_; }

  Eigen::VectorXd point(Eigen::Index flat) const;
  // Per-axis node index of a flat index.
  std::vector<Eigen::Index> unravel(Eigen::Index flat) const;
  // Product of per-axis trapezoid weights.
  double weight(Eigen::Index flat) const;
  // True if any coordinate sits on its axis boundary.
  bool on_boundary(Eigen::Index flat) const;

 private:
  std::vector<Grid1D> axes_;
  std::vector<Eigen::VectorXd> axis_weights_;
  Eigen::Index size_ = 0;
};

}  // namespace orbitlab
