#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitlab/errors.hpp"

namespace orbitlab::config {

// One run of the verification suites. Parsed from a JSON document with the
// top-level keys {suite, potential, weight, grids, tolerances, seed, output},
// all optional; unknown keys are rejected.
struct RunConfig {
  std::string suite = "all";

  // potential
  std::string family = "projective_model";
  int k = 1;
  int m = 1;
  std::optional<Eigen::MatrixXd> A;  // quadratic_separable only
  double radius_x = 9.0;
  double radius_w = 2.0;
  std::string mode = "analytic";  // or "finite_difference"

  // weight
  std::string weight_kind = "constant";  // constant | affine_exponential | table
  double weight_constant = 1.0;
  std::vector<double> weight_a;  // linear form for affine_exponential

  // grids (node counts >= 33; extents are half-widths of the boxes)
  Eigen::Index x_nodes = 513;
  Eigen::Index w_nodes = 65;
  Eigen::Index p_nodes = 513;
  Eigen::Index t_nodes = 2049;  // transport suite grid
  double x_extent = 8.0;
  double w_extent = 2.0;

  // tolerances (all > 0)
  double identity_tol = 1e-10;
  double roundtrip_tol = 1e-8;
  double derivative_tol = 1e-5;
  double factorization_tol = 1e-8;
  double normalization_tol = 1e-6;
  double disintegration_tol = 1e-4;
  double transport_tol = 1e-3;

  std::uint64_t seed = 20260816;
  std::string output_dir = ".";
};

bool known_suite(const std::string& suite);

// Parse and validate a JSON config document. Malformed JSON, unknown keys,
// or invariant violations (grid sizes < 33, tolerances <= 0, unknown ids)
// raise ConfigError.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);
// Re-runs the invariant checks (for configs adjusted programmatically).
void validate(const RunConfig& cfg);

}  // namespace orbitlab::config
