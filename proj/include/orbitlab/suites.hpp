#pragma once

#include <string>
#include <vector>

#include "orbitlab/config.hpp"
#include "orbitlab/measures.hpp"

namespace orbitlab::suites {

using config::RunConfig;

struct CheckRecord {
  std::string name;
  double value = 0.0;      // measured quantity
  double error = 0.0;      // distance from the expectation
  double tolerance = 0.0;  // allowed error (0 for exact checks)
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckRecord> checks;
  bool pass = false;          // conjunction of the checks
  double wall_seconds = 0.0;  // console only, never serialized
};

SuiteReport run_minors(const RunConfig& cfg);
SuiteReport run_legendre(const RunConfig& cfg);
SuiteReport run_factorization(const RunConfig& cfg);
SuiteReport run_disintegration(const RunConfig& cfg);  // writes CSV dumps
SuiteReport run_transport(const RunConfig& cfg);       // writes CSV dumps

// Dispatch on cfg.suite ("all" runs the five in order).
std::vector<SuiteReport> run(const RunConfig& cfg);

// Versioned, field-order-stable JSON (no timestamps, so report bytes are
// reproducible for a fixed seed).
std::string report_json(const std::vector<SuiteReport>& reports);
void write_report(const std::vector<SuiteReport>& reports,
                  const std::string& path);

// CSV emitters, header row + fixed formatting. Orbit densities carry the
// fixed w coordinates; momentum densities have a single p column.
void write_orbit_density_csv(const measures::DensityField& field,
                             const Eigen::VectorXcd& w,
                             const std::string& path);
void write_momentum_density_csv(const measures::DensityField& field,
                                const std::string& path);

}  // namespace orbitlab::suites
