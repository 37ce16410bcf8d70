#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "crgeo/models.hpp"
#include "crgeo/suite.hpp"

using namespace crgeo;
using nlohmann::ordered_json;

namespace {

std::string config_error(const std::string& text) {
    try {
        parse_suite_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "accepted: " << text;
    return "";
}

SuiteConfig quick(const std::string& structure, std::vector<std::string> checks) {
    SuiteConfig c;
    c.structure = structure;
    c.samples = 4;
    c.geodesic_samples = 2;
    c.checks = std::move(checks);
    return c;
}

const CheckResult& result(const Report& r, const std::string& name) {
    for (const CheckResult& c : r.checks)
        if (c.name == name) return c;
    throw std::runtime_error("missing " + name);
}

}  // namespace

TEST(SuiteConfig, Defaults) {
    SuiteConfig c = parse_suite_config("{}");
    EXPECT_EQ(c.structure, "heisenberg");
    EXPECT_EQ(c.m, 1);
    EXPECT_EQ(c.seed, 42u);
    EXPECT_EQ(c.samples, 100);
    EXPECT_EQ(c.geodesic_samples, 20);
    EXPECT_EQ(c.mode, DiffMode::AD);
    EXPECT_DOUBLE_EQ(c.tolerances.algebraic, 1e-10);
    EXPECT_DOUBLE_EQ(c.tolerances.first_order, 1e-8);
    EXPECT_DOUBLE_EQ(c.tolerances.second_order, 1e-6);
    EXPECT_TRUE(c.checks.empty());
}

TEST(SuiteConfig, ParsesEveryKey) {
    SuiteConfig c = parse_suite_config(R"({
      "structure": "sphere", "m": 2, "seed": 7, "samples": 9, "geodesic_samples": 3,
      "tolerances": {"algebraic": 1e-9, "first_order": 1e-7, "second_order": 1e-5},
      "mode": "FD", "checks": ["structure_axioms"],
      "expectations": {"pseudo_kahler": "fail", "sasakian_type": false, "structure_axioms": "pass"},
      "tolerance_overrides": {"structure_axioms": 0.5}, "curvature": 1.0,
      "points": [[0, 0, 0, 0, 0]], "output": "r.json"
    })");
    EXPECT_EQ(c.structure, "sphere");
    EXPECT_EQ(c.m, 2);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.samples, 9);
    EXPECT_EQ(c.geodesic_samples, 3);
    EXPECT_EQ(c.mode, DiffMode::FD);
    EXPECT_DOUBLE_EQ(c.tolerances.second_order, 1e-5);
    EXPECT_FALSE(c.expectations.at("pseudo_kahler"));
    EXPECT_FALSE(c.expectations.at("sasakian_type"));
    EXPECT_TRUE(c.expectations.at("structure_axioms"));
    EXPECT_DOUBLE_EQ(c.tolerance_overrides.at("structure_axioms"), 0.5);
    EXPECT_DOUBLE_EQ(*c.curvature, 1.0);
    ASSERT_EQ(c.points.size(), 1u);
    EXPECT_EQ(c.output, "r.json");
}

TEST(SuiteConfig, Rejections) {
    EXPECT_NE(config_error(R"({"sampels": 3})").find("unknown config key 'sampels'"), std::string::npos);
    EXPECT_NE(config_error(R"({"checks": ["ricci_flat"]})").find("unknown check 'ricci_flat'"), std::string::npos);
    EXPECT_NE(config_error(R"({"expectations": {"nope": "fail"}})").find("in expectations"), std::string::npos);
    EXPECT_NE(config_error(R"({"tolerance_overrides": {"nope": 1}})").find("in tolerance_overrides"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"expectations": {"pseudo_kahler": "maybe"}})").find("\"pass\" or \"fail\""),
              std::string::npos);
    EXPECT_NE(config_error(R"({"mode": "CS"})").find("AD or FD"), std::string::npos);
    EXPECT_NE(config_error(R"({"tolerances": {"third_order": 1}})").find("unknown tolerance"), std::string::npos);
    EXPECT_NE(config_error(R"({"samples": 0})").find("samples"), std::string::npos);
    EXPECT_NE(config_error(R"({"m": 4})").find("m must be"), std::string::npos);
    EXPECT_NE(config_error(R"({"tolerances": {"algebraic": -1}})").find("positive"), std::string::npos);
    EXPECT_NE(config_error(R"({"samples": "many"})").find("type error"), std::string::npos);
    EXPECT_NE(config_error("[1]").find("object"), std::string::npos);
    EXPECT_NE(config_error("{").find("invalid JSON"), std::string::npos);
    EXPECT_THROW(load_suite_config("/nonexistent/cfg.json"), ConfigError);
}

TEST(SuiteConfig, UnknownStructureIsConfigError) {
    SuiteConfig c;
    c.structure = "torus";
    EXPECT_THROW(resolve_structure(c), ConfigError);
    c.structure = "sphere";
    std::string source;
    EXPECT_EQ(resolve_structure(c, &source).chart.dim(), 3);
    EXPECT_EQ(source, "model");
}

TEST(Registry, NamesUniqueAndFindable) {
    std::set<std::string> names;
    for (const CheckInfo& c : registered_checks()) {
        EXPECT_TRUE(names.insert(c.name).second) << c.name;
        EXPECT_EQ(find_check(c.name), &c);
        EXPECT_FALSE(c.description.empty());
    }
    EXPECT_EQ(find_check("nope"), nullptr);
    EXPECT_FALSE(find_check("cartan_mismatch_control")->default_expected);
    EXPECT_TRUE(find_check("mixed_homothety")->needs_curvature);
}

TEST(Registry, DefaultChecksDependOnCurvature) {
    Structure P = perturbed_heisenberg(1);
    auto plain = default_checks(P, std::nullopt);
    auto nan = default_checks(P, std::numeric_limits<double>::quiet_NaN());
    EXPECT_EQ(plain, nan);
    for (const std::string& n : plain) EXPECT_FALSE(find_check(n)->needs_curvature) << n;
    auto all = default_checks(heisenberg(1), 0.0);
    EXPECT_EQ(all.size(), registered_checks().size());
    EXPECT_LT(plain.size(), all.size());
}

TEST(Tolerances, TiersOverridesAndFdScaling) {
    SuiteConfig c;
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("structure_axioms")), 1e-10);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("connection_axioms")), 1e-8);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("space_form_tensor")), 1e-6);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("jacobi_duality")), 1e-5);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("log_exp_roundtrip")), 1e-7);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("geodesic_speed_drift")), 1e-8);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("cartan_isometry")), 1e-5);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("cartan_differential")), 1e-6);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("classification_agreement")), 0.0);
    c.mode = DiffMode::FD;
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("structure_axioms")), 1e-7);
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("space_form_tensor")), 1e-3);
    c.tolerance_overrides["space_form_tensor"] = 0.25;
    EXPECT_DOUBLE_EQ(tolerance_for(c, *find_check("space_form_tensor")), 0.25);
}

TEST(Report, DeterministicBody) {
    SuiteConfig c = quick("sphere", {"structure_axioms", "connection_axioms", "space_form_constant", "log_exp_roundtrip"});
    Report a = run_suite(c), b = run_suite(c);
    EXPECT_EQ(report_to_json(a, false), report_to_json(b, false));
    EXPECT_EQ(report_to_json(a, false).find("wall_time_ms"), std::string::npos);
    EXPECT_NE(report_to_json(a, true).find("wall_time_ms"), std::string::npos);
    c.seed = 43;
    EXPECT_NE(report_to_json(run_suite(c), false), report_to_json(a, false));
}

TEST(Report, SchemaAndKeyOrder) {
    Report r = run_suite(quick("heisenberg", {"structure_axioms", "horizontally_kahler"}));
    ordered_json j = ordered_json::parse(report_to_json(r));
    std::vector<std::string> keys;
    for (auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"schema", "version", "structure", "config", "checks", "classification",
                                              "calibration", "summary"}));
    EXPECT_EQ(j["schema"], "crgeo.report/1");
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["version"], artifact_version());
    EXPECT_EQ(j["structure"]["name"], "heisenberg");
    EXPECT_EQ(j["structure"]["source"], "model");
    EXPECT_EQ(j["structure"]["dimension"], 3);
    EXPECT_EQ(j["config"]["samples"], 4);
    ASSERT_EQ(j["checks"].size(), 2u);
    std::vector<std::string> ck;
    for (auto& [k, v] : j["checks"][0].items()) ck.push_back(k);
    EXPECT_EQ(ck, (std::vector<std::string>{"name", "max_residual", "tolerance", "pass", "expected", "sample_count",
                                            "wall_time_ms", "values"}));
    EXPECT_EQ(j["checks"][0]["name"], "structure_axioms");
    EXPECT_EQ(j["checks"][0]["expected"], "pass");
    EXPECT_TRUE(j["classification"]["pseudo_kahler"].get<bool>());
    EXPECT_TRUE(j["summary"]["expectations_met"].get<bool>());
    EXPECT_EQ(j["summary"]["passed"], 2);
}

TEST(Report, PerturbedNeedsDeclaredExpectations) {
    SuiteConfig c = quick("perturbed_heisenberg", {"horizontally_kahler", "pseudo_kahler", "sasakian_type",
                                                   "connection_axioms", "classification_agreement"});
    Report r = run_suite(c);
    EXPECT_TRUE(result(r, "horizontally_kahler").pass);
    EXPECT_FALSE(result(r, "pseudo_kahler").pass);
    EXPECT_FALSE(r.all_expectations_met());
    c.expectations = {{"pseudo_kahler", false}, {"sasakian_type", false}};
    r = run_suite(c);
    EXPECT_TRUE(r.all_expectations_met());
    ordered_json j = ordered_json::parse(report_to_json(r));
    EXPECT_EQ(j["checks"][1]["expected"], "fail");
    EXPECT_TRUE(j["summary"]["expectations_met"].get<bool>());
    EXPECT_TRUE(r.classification->horizontally_kahler);
    EXPECT_FALSE(r.classification->pseudo_kahler);
}

TEST(Report, ToleranceOverrideFlipsVerdict) {
    SuiteConfig c = quick("sphere", {"space_form_constant"});
    EXPECT_TRUE(run_suite(c).checks[0].pass);
    c.tolerance_overrides["space_form_constant"] = 0.0;
    const CheckResult r = run_suite(c).checks[0];
    EXPECT_DOUBLE_EQ(r.tolerance, 0.0);
    EXPECT_GT(r.max_residual, 0.0);
    EXPECT_FALSE(r.pass);
}

TEST(Report, FiniteDifferenceModeStillPasses) {
    SuiteConfig c = quick("sphere", {"structure_calculus", "connection_axioms", "space_form_constant"});
    c.mode = DiffMode::FD;
    Report r = run_suite(c);
    EXPECT_EQ(r.mode, "FD");
    for (const CheckResult& k : r.checks) EXPECT_TRUE(k.pass) << k.name << " " << k.max_residual;
}

TEST(Report, ExplicitPoints) {
    SuiteConfig c = quick("heisenberg", {"structure_axioms", "connection_axioms"});
    c.points = {{0, 0, 0}, {0.5, -0.5, 1.0}};
    Report r = run_suite(c);
    EXPECT_EQ(r.samples, 2);
    EXPECT_EQ(r.checks[0].sample_count, 2);
    c.points = {{0, 0}};
    EXPECT_THROW(run_suite(c), ConfigError);
    c.points = {{100, 0, 0}};
    EXPECT_THROW(run_suite(c), ConfigError);
}

TEST(Report, CurvatureChecksNeedConstant) {
    SuiteConfig c = quick("perturbed_heisenberg", {"space_form_constant"});
    EXPECT_THROW(run_suite(c), ConfigError);
    c.curvature = 0.0;
    EXPECT_FALSE(run_suite(c).checks[0].pass);
}

TEST(Report, NegativeControlExpectedToFail) {
    Report r = run_suite(quick("sphere", {"cartan_mismatch_control"}));
    EXPECT_FALSE(r.checks[0].pass);
    EXPECT_FALSE(r.checks[0].expected);
    EXPECT_TRUE(r.all_expectations_met());
}

TEST(Report, WritesOutputFile) {
    auto path = std::filesystem::temp_directory_path() / "crgeo_report_test.json";
    SuiteConfig c = quick("heisenberg", {"structure_axioms"});
    c.output = path.string();
    Report r = run_suite(c);
    std::ifstream in(path);
    ordered_json j = ordered_json::parse(in);
    EXPECT_EQ(j["checks"][0]["name"], "structure_axioms");
    std::filesystem::remove(path);
}
