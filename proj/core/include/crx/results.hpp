#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "crx/harness.hpp"

namespace crx::harness {

/// CSV of sweep rows preceded by a "# config_hash=<hex>" line.
void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep,
                     const std::string& config_hash, bool averaged = false);
SweepResult read_sweep_csv(const std::filesystem::path& path);

/// CSV of evaluation records (one per strategy and seed).
void write_eval_csv(const std::filesystem::path& path, const std::vector<EvalRecord>& records,
                    const std::string& config_hash);
std::vector<EvalRecord> read_eval_csv(const std::filesystem::path& path);

/// Whitespace-separated columns: x followed by one mean CRB column per
/// strategy, for gnuplot.
void write_plot_data(const std::filesystem::path& path, const SweepResult& sweep);

struct RunManifest {
  std::string command;
  ExperimentConfig config;
  double wall_time_s = 0.0;
  std::vector<std::string> files;
};

nlohmann::json manifest_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

/// Creates `dir` if needed; throws IoError when it cannot be written.
void ensure_output_dir(const std::filesystem::path& dir);

}  // namespace crx::harness
