#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "orbitlab/grid.hpp"
#include "orbitlab/measures.hpp"
#include "orbitlab/potentials.hpp"

namespace orbitlab::transport {

using legendre::NewtonOptions;
using measures::DensityField;
using measures::WeightFunction;

// Normalized cumulative distribution of a 1-D density field; ends at 1.
GridFunction1D cdf(const DensityField& density);

// Monotone rearrangement between two 1-D densities, tabulated on the
// source nodes.
struct MonotoneMap1D {
  Grid1D x_nodes;
  Eigen::VectorXd T_values;  // strictly increasing
  std::string source_id;
  std::string target_id;

  double operator()(double x) const;  // linear interpolation
};

// T = G^{-1} o F via inverse-CDF interpolation. Both densities must be
// positive on their grid interiors (flat CDF stretches are rejected).
MonotoneMap1D monotone_transport(const DensityField& source,
                                 const DensityField& target);

// Sup over the grid of |momentum map - monotone transport| where the
// transport runs from the conditional density to its pushforward (k = 1).
double verify_momentum_is_transport(const TorusPotential& P,
                                    const WeightFunction& g,
                                    const Eigen::VectorXcd& w,
                                    const Grid1D& x_grid,
                                    const NewtonOptions& opts = {});

// Antiderivative of the monotone transport map from eta to nu, anchored to
// u(anchor_x) = 0. Recovers the potential on the orbit up to a constant.
GridFunction1D reconstruct_potential(const DensityField& eta,
                                     const DensityField& nu, double anchor_x);

struct ReconstructionReport {
  Eigen::VectorXcd w;
  double sup_norm = 0.0;  // of the mean-centered difference on the nodes
  bool pass = false;
};

// Compares a reconstructed orbit potential with the original, modulo an
// additive constant (mean-centering on the node set).
ReconstructionReport compare_reconstruction(const GridFunction1D& u,
                                            const TorusPotential& P,
                                            const Eigen::VectorXcd& w,
                                            double tol);

struct OtAssignment {
  std::vector<int> assignment;  // target index for each source point
  double cost = 0.0;            // sum of squared differences
};

// Exhaustive quadratic-cost matching for point sets of size <= 8. Ties keep
// the lexicographically first permutation, so equal-cost cases stay at the
// identity.
OtAssignment discrete_ot_oracle(const Eigen::VectorXd& source_points,
                                const Eigen::VectorXd& target_points);

struct UniquenessRow {
  std::complex<double> w;
  double shift_density_dev = 0.0;      // P vs P + c, conditional densities
  double shift_momentum_dev = 0.0;     // P vs P + c, momentum maps
  double shift_pushforward_dev = 0.0;  // P vs P + c, pushforward densities
  double weight_scale_dev = 0.0;       // g vs s*g, conditional densities
  double alt_density_gap = 0.0;        // P vs P_alt, sup density distance
};

struct UniquenessReport {
  std::vector<UniquenessRow> rows;
  double max_shift_density_dev = 0.0;
  double max_shift_momentum_dev = 0.0;
  double max_shift_pushforward_dev = 0.0;
  double max_weight_scale_dev = 0.0;
  double min_alt_density_gap = 0.0;
};

// Additive constants and weight rescalings leave the conditional data
// unchanged (deviations near round-off), while a potential with a different
// momentum image separates by a positive density gap. k = 1, m = 1.
UniquenessReport uniqueness_experiment(
    const TorusPotential& P, const TorusPotential& P_alt,
    const WeightFunction& g, const std::vector<std::complex<double>>& w_set,
    const Grid1D& x_grid, double offset_c = 0.7, double g_scale = 2.0,
    const NewtonOptions& opts = {});

}  // namespace orbitlab::transport
