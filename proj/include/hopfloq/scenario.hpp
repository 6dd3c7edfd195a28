#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hopfloq/curves.hpp"
#include "hopfloq/hopf.hpp"
#include "hopfloq/strip.hpp"

namespace hopfloq {

struct ScenarioConfig {
    std::string name = "custom";
    std::string model = "piecewise";  // piecewise | harmonic

    // piecewise parameters
    double mu1 = -10.0;
    double mu2 = -5.0;
    double t0 = 0.1;
    double period = 1.0;
    // harmonic parameters
    double mu = -10.0;
    double omega = 12.0;

    int hopf_grid = 48;
    int strip_nx = 60;
    int k2_points = 121;
    int threads = 1;

    double edge_weight_threshold = 0.8;
    double edge_window_frac = 0.1;  // window half-width in units of pi/T

    std::string out_dir = "out";

    DriveProtocol drive() const;
    void validate() const;
};

/// The four builtin parameter sets.
std::vector<ScenarioConfig> builtin_scenarios();
ScenarioConfig builtin_scenario(const std::string& name);

/// Flat key=value config; '#' comments; unknown keys are errors. A
/// "scenario=<builtin>" line selects the base parameter set first.
ScenarioConfig parse_config_file(const std::string& path);
void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value);

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    ScenarioConfig config;
    HopfSummary topology;
    std::optional<LinkingResult> linking;
    std::string linking_skipped_reason;
    std::string linking_poles = "z";  // "x" when the rotated pole pair was needed
    int edge_modes_gap0 = 0;
    int edge_modes_gap_pi = 0;
    std::optional<double> xi_gap0;  // localization length when an edge mode exists
    std::optional<SpectrumTable> spectrum;  // kept for downstream analysis
    std::vector<StageTiming> timings;
    std::map<std::string, std::string> manifest;  // file -> fnv1a-64 hex
    std::string error;  // nonempty when a stage failed

    bool ok() const { return error.empty(); }
};

/// Full pipeline: pseudo-spin grid, Hopf integral, preimage curves + linking,
/// strip spectrum, edge modes and profiles; emits CSVs and summary.json under
/// config.out_dir.
RunReport run_scenario(const ScenarioConfig& config);

/// Formatted scenario listing (builtins plus an optional user config).
std::string list_scenarios(const std::optional<std::string>& config_path = {});

struct SweepEntry {
    double value = 0.0;
    RunReport report;
};

/// Runs run_scenario per swept value; failures are recorded and the sweep
/// continues. parameter is one of t0, mu2, mu, omega.
std::vector<SweepEntry> sweep(const ScenarioConfig& base, const std::string& parameter,
                              const std::vector<double>& values);

/// 17-significant-digit CSV float format used by every emitted file.
std::string csv_double(double v);

/// FNV-1a 64-bit content hash, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace hopfloq
