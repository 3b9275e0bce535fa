#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isingtest/config.hpp"
#include "isingtest/model.hpp"

namespace isingtest {

/// One power-study grid: a tester tag, an instance family with parameters,
/// sample budgets, and trials per cell. Fully deterministic given the seed.
struct ExperimentSpec {
    std::string tester;           // loc-ind, loc-id, forest-ind, forest-id,
                                  // ferro-ind, ltt-ind, ltt-id
    std::string family;           // uniform, random-matching,
                                  // product-perturbation, dense-alternating,
                                  // path, model-file
    std::string model_path;       // family == model-file
    std::string q_path;           // identity target (default: uniform)
    int n = 12;
    double eps = 0.0;             // 0: use certified_skl / 2 per instance
    double theta = 0.3;           // family parameter (path)
    int instances = 1;
    std::vector<long long> budgets;  // strictly increasing; 0 entry = formula
    int trials = 20;
    std::uint64_t seed = 1;
    std::string out = "experiment.csv";
    std::string sampler = "auto";    // auto | exact | glauber
    double burn_in_multiplier = 10.0;
    double thinning_multiplier = 2.0;
    bool timings = false;  // wall-time column; breaks byte-reproducibility
    TesterConfig tester_config;
    PromisedBounds bounds;  // zero fields are filled from the instances

    void validate() const;
};

struct CellStats {
    double reject_rate = 0.0;
    double mean_statistic = 0.0;
    long long wall_time_ms = 0;
};

struct ExperimentReport {
    // (instance label, budget) -> aggregate
    std::map<std::pair<std::string, long long>, CellStats> cells;
    std::vector<std::string> warnings;  // per-cell promise mismatches
};

ExperimentSpec parse_experiment_spec(const std::string& path);
ExperimentSpec parse_experiment_spec_json(const std::string& text);

/// Runs the grid and writes <out> (one row per instance/budget/trial, schema=1
/// header) plus <out>.power.csv (smallest budget reaching 80% rejection per
/// instance, against d_max). Rows are emitted in (instance, budget, trial)
/// order, so identical specs produce byte-identical files.
ExperimentReport run_trials(const ExperimentSpec& spec);

}  // namespace isingtest
