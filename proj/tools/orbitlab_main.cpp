#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "orbitlab/config.hpp"
#include "orbitlab/errors.hpp"
#include "orbitlab/suites.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical verification suites for torus-invariant potentials"};
  app.get_formatter()->column_width(28);

  std::string suite;
  std::string config_path;
  std::string out_dir;
  long long seed = -1;

  app.add_option("suite", suite,
                 "verify-minors | verify-legendre | verify-factorization | "
                 "verify-disintegration | verify-transport | all")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "seed override (non-negative integer)");
  app.add_option("--out", out_dir, "output directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0, bad usage exits 2
  }

  orbitlab::config::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = orbitlab::config::load_config(config_path);
    cfg.suite = suite;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    orbitlab::config::validate(cfg);
  } catch (const orbitlab::Error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  }

  try {
    std::filesystem::create_directories(cfg.output_dir);
    const auto reports = orbitlab::suites::run(cfg);
    bool all_pass = true;
    for (const auto& report : reports) {
      std::printf("[%s] %s: %zu checks, %.2f s\n",
                  report.pass ? "PASS" : "FAIL", report.suite.c_str(),
                  report.checks.size(), report.wall_seconds);
      for (const auto& check : report.checks) {
        if (!check.pass)
          std::printf("       failed: %s (value %.6g, error %.3g, tol %.3g)\n",
                      check.name.c_str(), check.value, check.error,
                      check.tolerance);
      }
      all_pass = all_pass && report.pass;
    }
    const std::string report_path = cfg.output_dir + "/report.json";
    orbitlab::suites::write_report(reports, report_path);
    std::printf("report: %s\n", report_path.c_str());
    return all_pass ? 0 : 1;
  } catch (const orbitlab::Error& e) {
    std::fprintf(stderr, "run failed: %s\n", e.what());
    return 1;
  }
}
