#include <algorithm>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "vforms/scenario.hpp"

using namespace vforms;
using nlohmann::json;

namespace {

const char* kInlineScenario = R"json({
  "id": "inline_smoke",
  "quad_order": 16,
  "seed": 7,
  "manifolds": {
    "band": {
      "dim": 2,
      "charts": [{"id": "u", "image": [[0, 0], [2, 1]]}]
    }
  },
  "forms": {
    "f": {"manifold": "band", "degree": 0, "space": "R",
          "charts": {"u": {"": "sin(x1) * x2^3 + x1^2"}}}
  },
  "checks": [
    {"kind": "dd_zero", "form": "f"},
    {"kind": "partition_sum", "manifold": "band", "target": [[0.2, 0.2], [1.8, 0.8]]}
  ]
})json";

}  // namespace

TEST_CASE("bundled scenarios are enumerable and retrievable") {
    const auto names = bundled_scenario_names();
    CHECK(names.size() == 13);
    CHECK(std::find(names.begin(), names.end(), "disk_stokes") != names.end());
    CHECK(std::find(names.begin(), names.end(), "ddzero_corpus") != names.end());
    CHECK(!bundled_scenario_text("leibniz_corpus").empty());
    CHECK_THROWS_AS((void)bundled_scenario_text("no_such_scenario"), std::invalid_argument);
}

TEST_CASE("malformed JSON is a schema violation") {
    const RunOutcome out = run_scenario_text("{ not json");
    CHECK(out.exit_code == 2);
    CHECK(out.error.find("schema violation") != std::string::npos);
    CHECK(out.report_json.empty());
}

TEST_CASE("missing required members are schema violations with a location") {
    const RunOutcome out = run_scenario_text(R"({"checks": []})");
    CHECK(out.exit_code == 2);
    CHECK(out.error.find("schema violation") != std::string::npos);
    CHECK(out.error.find("id") != std::string::npos);
}

TEST_CASE("unknown check kinds are schema violations") {
    const RunOutcome out = run_scenario_text(
        R"({"id": "x", "checks": [{"kind": "telepathy"}]})");
    CHECK(out.exit_code == 2);
    CHECK(out.error.find("unknown check kind") != std::string::npos);
}

TEST_CASE("expression errors surface with their byte offset") {
    const RunOutcome out = run_scenario_text(R"({
      "id": "x",
      "manifolds": {"box2": "box2"},
      "forms": {"f": {"manifold": "box2", "degree": 0, "space": "R",
                      "charts": {"main": {"": "x1 @ x2"}}}},
      "checks": []
    })");
    CHECK(out.exit_code == 2);
    CHECK(out.error.find("parse error at byte 3") != std::string::npos);
}

TEST_CASE("unreadable scenario files are reported as schema violations") {
    const RunOutcome out = run_scenario_file("/no/such/file.json");
    CHECK(out.exit_code == 2);
    CHECK(out.error.find("schema violation") != std::string::npos);
}

TEST_CASE("inline atlases run end to end and pass their checks") {
    RunOptions opts;
    opts.timestamp = "2026-01-01T00:00:00Z";
    const RunOutcome out = run_scenario_text(kInlineScenario, opts);
    REQUIRE(out.exit_code == 0);

    const json rep = json::parse(out.report_json);
    CHECK(rep["schema_version"] == 1);
    CHECK(rep["scenario"] == "inline_smoke");
    CHECK(rep["timestamp"] == "2026-01-01T00:00:00Z");
    CHECK(rep["environment"]["seed"] == 7);
    CHECK(rep["environment"]["quad_order"] == 16);
    CHECK(rep["summary"]["total"] == 2);
    CHECK(rep["summary"]["passed"] == 2);
    CHECK(rep["summary"]["failed"] == 0);
    for (const auto& c : rep["checks"]) {
        CHECK(c["status"] == "pass");
        CHECK(c["residual"].get<double>() <= c["tolerance"].get<double>());
    }
    CHECK(out.human_summary.find("PASS") != std::string::npos);
}

TEST_CASE("reports are byte-identical when the stamped time is fixed") {
    RunOptions opts;
    opts.timestamp = "2026-01-01T00:00:00Z";
    const RunOutcome a = run_scenario_text(kInlineScenario, opts);
    const RunOutcome b = run_scenario_text(kInlineScenario, opts);
    CHECK(a.report_json == b.report_json);
}

TEST_CASE("command-line overrides take precedence over the document") {
    RunOptions opts;
    opts.seed = 99;
    opts.quad_order = 8;
    opts.timestamp = "t";
    const RunOutcome out = run_scenario_text(kInlineScenario, opts);
    const json rep = json::parse(out.report_json);
    CHECK(rep["environment"]["seed"] == 99);
    CHECK(rep["environment"]["quad_order"] == 8);
}

TEST_CASE("tolerance scaling can turn a failing run green without editing it") {
    const RunOutcome fail = run_scenario_text(bundled_scenario_text("inject_boundary_sign"));
    CHECK(fail.exit_code == 1);

    RunOptions opts;
    opts.tolerance_scale = 1e9;
    const RunOutcome pass = run_scenario_text(bundled_scenario_text("inject_boundary_sign"), opts);
    CHECK(pass.exit_code == 0);
    const json rep = json::parse(pass.report_json);
    CHECK(rep["environment"]["tolerance_scale"].get<double>() == 1e9);
}

TEST_CASE("failing checks still produce a full report") {
    const RunOutcome out = run_scenario_text(bundled_scenario_text("inject_uncovered_support"));
    CHECK(out.exit_code == 1);
    const json rep = json::parse(out.report_json);
    CHECK(rep["summary"]["failed"] == 1);
    CHECK(rep["checks"][0]["status"] == "fail");
    CHECK(rep["checks"][0]["residual"].get<double>() >= 1e-2);
    CHECK(out.human_summary.find("FAIL") != std::string::npos);
}
