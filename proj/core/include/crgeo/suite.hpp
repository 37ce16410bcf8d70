#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crgeo/chart.hpp"
#include "crgeo/structure.hpp"

namespace crgeo {

inline constexpr const char* kReportSchema = "crgeo.report/1";
const char* artifact_version();

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Tier { algebraic, first_order, second_order, geodesic, isometry, exact };

struct Tolerances {
    double algebraic = 1e-10;
    double first_order = 1e-8;
    double second_order = 1e-6;
};

struct SuiteConfig {
    std::string structure = "heisenberg";  // model name, or a path ending in .json
    int m = 1;
    std::uint64_t seed = 42;
    int samples = 100;
    int geodesic_samples = 20;
    Tolerances tolerances;
    DiffMode mode = DiffMode::AD;
    std::vector<std::string> checks;             // empty selects every check applicable to the structure
    std::map<std::string, bool> expectations;    // check -> expected pass flag; missing means pass
    std::map<std::string, double> tolerance_overrides;
    std::optional<double> curvature;            // space-form constant; models supply their own
    std::vector<std::vector<double>> points;     // replaces the random pointwise samples when non-empty
    std::string output;
};

// Throws ConfigError on unknown keys, unknown checks or invalid values.
SuiteConfig parse_suite_config(const std::string& json_text);
SuiteConfig load_suite_config(const std::string& path);
void validate(const SuiteConfig& cfg);

struct CheckInfo {
    std::string name;
    Tier tier;
    bool needs_curvature;   // space-form constant required
    bool default_expected;  // negative controls are expected to fail
    std::string description;
};
const std::vector<CheckInfo>& registered_checks();
const CheckInfo* find_check(const std::string& name);

struct CheckResult {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool expected = true;
    int sample_count = 0;
    double wall_time_ms = 0.0;
    std::vector<std::pair<std::string, double>> values;  // informational measurements, in report order
    std::string error;                                   // set when the check aborted
    bool matches_expectation() const { return pass == expected; }
};

struct Verdicts {
    bool horizontally_kahler = false;
    bool pseudo_kahler = false;
    bool sasakian_type = false;
    bool domega_pseudo_kahler = false;
    bool agrees = false;
};

struct Report {
    std::string schema = kReportSchema;
    std::string version;
    std::string structure;
    std::string source;  // "model" or "spec"
    int m = 0;
    std::vector<Interval> bounds;
    std::string mode;
    std::uint64_t seed = 0;
    int samples = 0;
    Tolerances tolerances;
    std::optional<double> curvature;
    std::vector<CheckResult> checks;
    std::optional<Verdicts> classification;
    std::map<std::string, double> calibration;
    std::vector<std::string> sweep_columns;  // optional grid sweep block
    std::vector<std::vector<double>> sweep_rows;

    bool all_expectations_met() const;
};

// The structure named by cfg.structure (model or spec file).
Structure resolve_structure(const SuiteConfig& cfg, std::string* source = nullptr);
// Checks selected by default for a structure; space-form checks need a finite curvature constant.
std::vector<std::string> default_checks(const Structure& S, std::optional<double> curvature);

Report run_suite(const SuiteConfig& cfg);
// Runs the checks against an already constructed structure.
Report run_suite(const SuiteConfig& cfg, const Structure& S, const std::string& source);

double tolerance_for(const SuiteConfig& cfg, const CheckInfo& info);

// UTF-8 JSON with fixed key order; wall_time_ms fields are dropped when include_timing is false.
std::string report_to_json(const Report& r, bool include_timing = true);

}  // namespace crgeo
