#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "crx/checkpoint.hpp"
#include "crx/errors.hpp"
#include "crx/harness.hpp"
#include "crx/results.hpp"
#include "crx/verify.hpp"

namespace fs = std::filesystem;
using namespace crx;
using harness::ExperimentConfig;
using harness::Strategy;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string profile;
  std::optional<std::uint64_t> seed;
  std::string strategy;
  std::string out = "out";
  std::vector<std::string> sets;
  std::optional<double> theta_deg;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--profile", o.profile, "Preset: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", o.seed, "Run seed (replaces the config's seed list)");
  cmd->add_option("--strategy", o.strategy, "FPA_RBF, FPA_TD3, MA_TD3 or CR_MA_TD3");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--set", o.sets, "Config override key=value (value parsed as JSON)");
  cmd->add_option("--theta-deg", o.theta_deg, "Target angle in degrees");
}

ExperimentConfig resolve(const CommonOptions& o) {
  nlohmann::json j = nlohmann::json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config: " + o.config_path + " is not valid JSON: " + e.what());
    }
  }
  if (!o.profile.empty()) j["profile"] = o.profile;
  for (const auto& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    try {
      j[key] = nlohmann::json::parse(value);
    } catch (const nlohmann::json::exception&) {
      j[key] = value;
    }
  }
  if (o.seed) j["seeds"] = {*o.seed};
  if (!o.strategy.empty()) j["strategy"] = o.strategy;
  if (o.theta_deg) j["theta_s_deg"] = *o.theta_deg;
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  fn(out);
  if (!out) throw IoError("write failed for " + path.string());
}

/// Greedy rollout on the first held-out scenario.
std::vector<env::TraceRow> trace_episode(const harness::PreparedStrategy& p,
                                         const ExperimentConfig& cfg, double snr_db) {
  env::EnvConfig e = cfg.env_config(p.strategy, snr_db);
  auto [state, scenario] = env::reset(harness::evaluation_seeds(cfg, p.seed).front(), e);
  std::vector<env::TraceRow> rows;
  for (int t = 0; t < e.steps_per_episode; ++t) {
    VectorXd a = p.agent->act(state.vector());
    env::Evaluation ev = env::evaluate(env::decode_activated(a, e), scenario, e);
    env::StepResult r = env::step_activated(state, a, scenario, e, t);
    env::TraceRow row{t, r.reward, ev.penalty, ev.crb_db, {}};
    for (double s : ev.sinr) row.sinr_db.push_back(linear_to_db(s));
    rows.push_back(std::move(row));
    state = std::move(r.next);
  }
  return rows;
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void finish_run(const fs::path& out, const std::string& command, const ExperimentConfig& cfg,
                double wall_time, std::vector<std::string> files) {
  write_json(out / "config.json", cfg);
  files.push_back("config.json");
  files.push_back("manifest.json");
  harness::write_manifest(out / "manifest.json", {command, cfg, wall_time, files});
  for (const auto& f : files) std::cout << (out / f).string() << '\n';
}

int cmd_train(const CommonOptions& o, bool wall_time) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = resolve(o);
  Strategy s = harness::parse_strategy(cfg.strategy);
  if (!harness::is_learned(s)) {
    throw ConfigError("train: " + cfg.strategy + " has nothing to train; use eval");
  }
  const std::uint64_t seed = cfg.seeds.front();
  fs::path out = o.out;
  harness::ensure_output_dir(out);

  auto prepared = harness::prepare_strategy(s, cfg, seed, nullptr, wall_time);
  write_file(out / "training_log.csv",
             [&](std::ostream& os) { td3::write_training_log(os, prepared.training_log); });
  nn::save_checkpoint((out / "checkpoint.crx").string(), prepared.agent->to_checkpoint());
  write_file(out / "episode_trace.csv", [&](std::ostream& os) {
    env::write_episode_trace(os, trace_episode(prepared, cfg, cfg.train_snr_db));
  });
  harness::write_eval_csv(out / "eval.csv",
                          {harness::evaluate_strategy(prepared, cfg, cfg.train_snr_db)},
                          harness::config_hash(cfg));
  finish_run(out, "train", cfg, elapsed(start),
             {"training_log.csv", "checkpoint.crx", "episode_trace.csv", "eval.csv"});
  return 0;
}

int cmd_eval(const CommonOptions& o, const std::string& checkpoint, std::optional<double> snr) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = resolve(o);
  Strategy s = harness::parse_strategy(cfg.strategy);
  fs::path out = o.out;
  harness::ensure_output_dir(out);
  const double snr_db = snr.value_or(cfg.train_snr_db);

  harness::PreparedStrategy p;
  p.strategy = s;
  p.seed = cfg.seeds.front();
  std::vector<std::string> files{"eval.csv"};
  if (harness::is_learned(s)) {
    if (checkpoint.empty()) throw ConfigError("eval: " + cfg.strategy + " needs --checkpoint");
    p.agent.emplace(td3::Agent::from_checkpoint(nn::load_checkpoint(checkpoint)));
    if (p.agent->layout().n_elements != cfg.n_elements ||
        p.agent->layout().n_users != cfg.n_users) {
      throw ConfigError("eval: checkpoint was trained for a different array or user count");
    }
    write_file(out / "episode_trace.csv", [&](std::ostream& os) {
      env::write_episode_trace(os, trace_episode(p, cfg, snr_db));
    });
    files.push_back("episode_trace.csv");
  }
  auto record = harness::evaluate_strategy(p, cfg, snr_db);
  harness::write_eval_csv(out / "eval.csv", {record}, harness::config_hash(cfg));
  std::cout << harness::to_string(s) << " seed " << p.seed << " snr " << snr_db
            << " dB: mean CRB " << record.mean_crb_db << " dB, min SINR " << record.min_sinr_db
            << " dB, feasibility " << record.feasibility_rate << '\n';
  finish_run(out, "eval", cfg, elapsed(start), files);
  return 0;
}

int cmd_sweep(const CommonOptions& o, bool region, bool plot_data) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentConfig cfg = resolve(o);
  fs::path out = o.out;
  harness::ensure_output_dir(out);
  const std::string stem = region ? "region_sweep" : "snr_sweep";
  harness::SweepResult sweep = region ? harness::region_sweep(cfg) : harness::snr_sweep(cfg);
  const std::string hash = harness::config_hash(cfg);
  std::vector<std::string> files{stem + ".csv", stem + "_mean.csv"};
  harness::write_sweep_csv(out / files[0], sweep, hash);
  harness::write_sweep_csv(out / files[1], sweep, hash, true);
  if (!sweep.first_training_log.empty()) {
    write_file(out / "training_log.csv",
               [&](std::ostream& os) { td3::write_training_log(os, sweep.first_training_log); });
    files.push_back("training_log.csv");
  }
  if (plot_data) {
    harness::write_plot_data(out / (stem + ".dat"), sweep);
    files.push_back(stem + ".dat");
  }
  finish_run(out, region ? "sweep-region" : "sweep-snr", cfg, elapsed(start), files);
  return 0;
}

int cmd_verify(std::uint64_t seed, bool learning, const CommonOptions& o) {
  std::vector<verify::CriterionResult> results = verify::run_numerical(seed);
  for (const auto& r : results) std::cout << verify::format(r) << std::endl;
  if (learning) {
    CommonOptions lo = o;
    if (lo.profile.empty() && lo.config_path.empty()) lo.profile = "desk";
    lo.seed.reset();
    ExperimentConfig cfg = resolve(lo);
    auto more = verify::run_learning(cfg, fs::path(o.out), [](const verify::CriterionResult& r) {
      std::cout << verify::format(r) << std::endl;
    });
    results.insert(results.end(), more.begin(), more.end());
  }
  for (const auto& r : results)
    if (!r.passed) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosstalk-aware movable-antenna ISAC: training, evaluation and sweeps"};
  app.require_subcommand(1);

  CommonOptions train_o, eval_o, snr_o, region_o, verify_o;
  bool wall_time = false, snr_plot = false, region_plot = false, learning = false;
  std::string checkpoint;
  std::optional<double> eval_snr;
  std::uint64_t verify_seed = 0;

  auto* train = app.add_subcommand("train", "Train one learned strategy");
  add_common(train, train_o);
  train->add_flag("--wall-time", wall_time, "Record elapsed seconds in the training log");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or random beamforming");
  add_common(eval, eval_o);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint written by train")
      ->check(CLI::ExistingFile);
  eval->add_option("--snr-db", eval_snr, "Evaluation SNR (default: training SNR)");

  auto* snr = app.add_subcommand("sweep-snr", "CRB versus SNR for the configured strategies");
  add_common(snr, snr_o);
  snr->add_flag("--plot-data", snr_plot, "Also write gnuplot-ready columns");

  auto* reg = app.add_subcommand("sweep-region", "CRB versus movable-region size");
  add_common(reg, region_o);
  reg->add_flag("--plot-data", region_plot, "Also write gnuplot-ready columns");

  auto* ver = app.add_subcommand("verify", "Run the numerical checks (and optionally learning)");
  add_common(ver, verify_o);
  ver->add_option("--check-seed", verify_seed, "Seed for randomized check instances");
  ver->add_flag("--learning", learning, "Also run the training-based checks (slow)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(train_o, wall_time);
    if (*eval) return cmd_eval(eval_o, checkpoint, eval_snr);
    if (*snr) return cmd_sweep(snr_o, false, snr_plot);
    if (*reg) return cmd_sweep(region_o, true, region_plot);
    if (*ver) return cmd_verify(verify_seed, learning, verify_o);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
