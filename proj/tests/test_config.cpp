#include <string>

#include "doctest.h"
#include "orbitlab/config.hpp"
#include "orbitlab/suites.hpp"

using namespace orbitlab;
using config::RunConfig;

TEST_CASE("defaults validate and match the empty document") {
  const RunConfig defaults;
  config::validate(defaults);  // no throw
  const RunConfig parsed = config::parse_config_text("{}");
  CHECK(parsed.suite == defaults.suite);
  CHECK(parsed.family == defaults.family);
  CHECK(parsed.k == defaults.k);
  CHECK(parsed.m == defaults.m);
  CHECK(parsed.x_nodes == defaults.x_nodes);
  CHECK(parsed.t_nodes == defaults.t_nodes);
  CHECK(parsed.transport_tol == defaults.transport_tol);
  CHECK(parsed.seed == defaults.seed);
  CHECK(parsed.output_dir == defaults.output_dir);
  CHECK_FALSE(parsed.A.has_value());
}

TEST_CASE("a full document lands in every field") {
  const std::string text = R"({
    "suite": "verify-transport",
    "potential": {
      "family": "quadratic_separable",
      "k": 2, "m": 1,
      "A": [[2.0, 0.5], [0.5, 1.0]],
      "radius_x": 5.0, "radius_w": 1.5,
      "mode": "finite_difference"
    },
    "weight": {"kind": "affine_exponential", "c": 2.0, "a": [1.0, -0.5]},
    "grids": {"x_nodes": 129, "w_nodes": 33, "p_nodes": 65, "t_nodes": 257,
              "x_extent": 4.0, "w_extent": 1.0},
    "tolerances": {"identity": 1e-9, "roundtrip": 1e-7, "derivative": 1e-4,
                   "factorization": 1e-7, "normalization": 1e-5,
                   "disintegration": 1e-3, "transport": 1e-2},
    "seed": 12345,
    "output": "out"
  })";
  const RunConfig cfg = config::parse_config_text(text);
  CHECK(cfg.suite == "verify-transport");
  CHECK(cfg.family == "quadratic_separable");
  CHECK(cfg.k == 2);
  CHECK(cfg.m == 1);
  REQUIRE(cfg.A.has_value());
  CHECK(cfg.A->rows() == 2);
  CHECK((*cfg.A)(0, 1) == 0.5);
  CHECK(cfg.radius_x == 5.0);
  CHECK(cfg.mode == "finite_difference");
  CHECK(cfg.weight_kind == "affine_exponential");
  CHECK(cfg.weight_constant == 2.0);
  CHECK((cfg.weight_a == std::vector<double>{1.0, -0.5}));
  CHECK(cfg.x_nodes == 129);
  CHECK(cfg.t_nodes == 257);
  CHECK(cfg.x_extent == 4.0);
  CHECK(cfg.identity_tol == 1e-9);
  CHECK(cfg.transport_tol == 1e-2);
  CHECK(cfg.seed == 12345);
  CHECK(cfg.output_dir == "out");
}

TEST_CASE("malformed and mistyped documents are rejected") {
  CHECK_THROWS_AS(config::parse_config_text("{ nope"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"suite": 3})"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"potential": {"k": "three"}})"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"seed": -1})"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"seed": 1.5})"), ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"output": ""})"), ConfigError);
}

TEST_CASE("unknown keys are rejected everywhere") {
  CHECK_THROWS_AS(config::parse_config_text(R"({"sweet": "all"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"potential": {"radius": 2.0}})"),
      ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"grids": {"nodes": 65}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"tolerances": {"master": 0.1}})"),
      ConfigError);
}

TEST_CASE("unknown identifiers are rejected") {
  CHECK_THROWS_AS(config::parse_config_text(R"({"suite": "verify-nothing"})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"potential": {"family": "mystery"}})"),
      ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"potential": {"mode": "symbolic"}})"),
      ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"weight": {"kind": "random"}})"),
                  ConfigError);
  CHECK(config::known_suite("verify-minors"));
  CHECK(config::known_suite("all"));
  CHECK_FALSE(config::known_suite("verify-nothing"));
}

TEST_CASE("numeric invariants are enforced") {
  CHECK_THROWS_AS(config::parse_config_text(R"({"grids": {"x_nodes": 9}})"),
                  ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"grids": {"x_nodes": 64.5}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"tolerances": {"identity": 0.0}})"),
      ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"tolerances": {"transport": -1e-3}})"),
      ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"weight": {"c": 0.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"potential": {"radius_x": -1.0}})"),
      ConfigError);
  CHECK_THROWS_AS(
      config::parse_config_text(R"({"potential": {"A": [[1.0, 2.0]]}})"),
      ConfigError);
  CHECK_THROWS_AS(config::parse_config_text(R"({"potential": {"A": []}})"),
                  ConfigError);

  config::RunConfig bad;
  bad.x_nodes = 9;
  CHECK_THROWS_AS(config::validate(bad), ConfigError);
  bad = config::RunConfig{};
  bad.k = 0;
  CHECK_THROWS_AS(config::validate(bad), ConfigError);
  bad = config::RunConfig{};
  bad.m = -1;
  CHECK_THROWS_AS(config::validate(bad), ConfigError);
}

TEST_CASE("missing config files are reported") {
  CHECK_THROWS_AS(config::load_config("/nonexistent/path/config.json"),
                  ConfigError);
}

TEST_CASE("report serialization is stable byte for byte") {
  suites::SuiteReport report;
  report.suite = "verify-minors";
  report.checks.push_back({"a", 1.0, 0.0, 0.0, true});
  report.pass = true;
  const std::string expected =
      "{\n"
      "  \"schema\": 1,\n"
      "  \"suites\": [\n"
      "    {\n"
      "      \"suite\": \"verify-minors\",\n"
      "      \"checks\": [\n"
      "        {\n"
      "          \"name\": \"a\",\n"
      "          \"value\": 1.0,\n"
      "          \"error\": 0.0,\n"
      "          \"tolerance\": 0.0,\n"
      "          \"pass\": true\n"
      "        }\n"
      "      ],\n"
      "      \"pass\": true\n"
      "    }\n"
      "  ],\n"
      "  \"pass\": true\n"
      "}\n";
  CHECK(suites::report_json({report}) == expected);
  CHECK(suites::report_json({report}) == suites::report_json({report}));
}

TEST_CASE("an empty report still carries the schema") {
  const std::string text = suites::report_json({});
  CHECK(text.find("\"schema\": 1") != std::string::npos);
  CHECK(text.find("\"pass\": true") != std::string::npos);
}
