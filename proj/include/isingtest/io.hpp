#pragma once

#include <string>

#include "isingtest/config.hpp"
#include "isingtest/exact.hpp"
#include "isingtest/hard_instances.hpp"
#include "isingtest/model.hpp"
#include "isingtest/sampling.hpp"
#include "isingtest/statistics.hpp"
#include "isingtest/testers.hpp"

namespace isingtest {

// Model file format (JSON):
//   {"n": int, "node_theta": [real x n], "edges": [[u, v, theta], ...]}
// 0-based indices, u < v required; duplicate and self edges are rejected.
IsingModel parse_model(const std::string& path);
IsingModel parse_model_json(const std::string& text);
void serialize_model(const IsingModel& model, const std::string& path);
std::string model_to_json(const IsingModel& model);

// SampleBatch: CSV with one row per sample, entries in {-1,1}, plus a sidecar
// JSON of the generation metadata at <path>.meta.json.
void write_sample_batch(const SampleBatch& batch, const std::string& csv_path);
SampleBatch read_sample_batch(const std::string& csv_path);

std::string verdict_to_json(const TestVerdict& verdict, const TesterConfig& config);
std::string summary_to_json(const ExactSummary& summary, const IsingModel& model);
std::string report_to_json(const StatisticReport& report);

void write_instance(const HardInstance& instance, const std::string& path_prefix);

}  // namespace isingtest
