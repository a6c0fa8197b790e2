#include "crx/harness.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "crx/errors.hpp"

namespace crx::harness {

namespace {

std::uint64_t strategy_stream(Strategy s) { return 0x5700 + static_cast<std::uint64_t>(s); }

ExperimentConfig with_region(const ExperimentConfig& cfg, double region_wavelengths) {
  ExperimentConfig c = cfg;
  c.p_max_m = cfg.p_min_m + region_wavelengths * cfg.wavelength();
  return c;
}

}  // namespace

std::vector<std::uint64_t> evaluation_seeds(const ExperimentConfig& cfg, std::uint64_t seed) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < cfg.eval_scenarios; ++i) out.push_back(mix_seed(seed, 0xE0000 + i));
  return out;
}

PreparedStrategy prepare_strategy(Strategy s, const ExperimentConfig& cfg, std::uint64_t seed,
                                  const td3::Agent* warm_start, bool record_wall_time) {
  PreparedStrategy p;
  p.strategy = s;
  p.seed = seed;
  if (!is_learned(s)) return p;
  td3::TrainOptions opts;
  opts.episodes = cfg.episodes;
  // All learned strategies see the same training scenarios and initial
  // weights for a given seed.
  opts.seed = mix_seed(seed, 0xA11);
  opts.eval_seeds = evaluation_seeds(cfg, seed);
  opts.warm_start = warm_start;
  opts.record_wall_time = record_wall_time;
  td3::TrainResult r = td3::train(cfg.env_config(s, cfg.train_snr_db), cfg.td3_config(), opts);
  p.agent.emplace(std::move(r.agent));
  p.training_log = std::move(r.log);
  return p;
}

EvalRecord evaluate_strategy(const PreparedStrategy& prepared, const ExperimentConfig& cfg,
                             double snr_db) {
  if (!is_learned(prepared.strategy)) {
    return evaluate_random_beamforming(cfg, prepared.seed, snr_db);
  }
  if (!prepared.agent) throw ProtocolError("evaluate: strategy has not been trained");
  const td3::Agent& agent = *prepared.agent;
  env::EnvConfig env_cfg = cfg.env_config(prepared.strategy, snr_db);
  td3::EvalSummary s = td3::evaluate_policy([&](const VectorXd& x) { return agent.act(x); },
                                            env_cfg, evaluation_seeds(cfg, prepared.seed));
  EvalRecord r;
  r.strategy = prepared.strategy;
  r.seed = prepared.seed;
  r.snr_db = snr_db;
  r.region_wavelengths = (cfg.p_max_m - cfg.p_min_m) / cfg.wavelength();
  r.mean_crb_db = s.crb_db;
  r.sinr_db = s.mean_sinr_db;
  r.min_sinr_db = s.mean_min_sinr_db;
  r.feasibility_rate = s.feasibility_rate;
  r.mean_reward = s.mean_reward;
  return r;
}

EvalRecord evaluate_random_beamforming(const ExperimentConfig& cfg, std::uint64_t seed,
                                       double snr_db) {
  env::EnvConfig env_cfg = cfg.env_config(Strategy::FpaRbf, snr_db);
  const int N = env_cfg.array.n_elements;
  const int K = env_cfg.scenario.n_users;
  const int cols = N + K;
  const double wavelength = env_cfg.array.wavelength;
  auto positions = array::AntennaPositions::uniform(env_cfg.array);
  MatrixXcd C = channel::coupling_matrix(positions, env_cfg.scenario.crosstalk);

  Rng rng(mix_seed(seed, strategy_stream(Strategy::FpaRbf)));
  std::normal_distribution<double> half(0.0, std::sqrt(0.5));

  double crb_sum = 0.0, reward_sum = 0.0, min_sinr_sum = 0.0, feasible = 0.0;
  std::vector<double> sinr_sum(K, 0.0);
  long count = 0;
  for (std::uint64_t s : evaluation_seeds(cfg, seed)) {
    auto scenario = env::reset(s, env_cfg).second;
    auto sensing = channel::effective_sensing_channel(positions, C, scenario.theta_s, wavelength);
    std::vector<VectorXcd> h;
    for (int k = 0; k < K; ++k) h.push_back(channel::user_channel(positions, scenario.users[k], wavelength));

    MatrixXcd F(N, cols);
    for (int d = 0; d < cfg.rbf_draws; ++d) {
      for (int j = 0; j < cols; ++j)
        for (int n = 0; n < N; ++n) F(n, j) = cd(half(rng), half(rng));
      F *= std::sqrt(env_cfg.p_sum / F.squaredNorm());
      auto gains = metrics::BeamGains::compute(sensing.g, sensing.g_dot, F);
      crb_sum += metrics::crb_theta(gains, scenario.alpha_s, scenario.sigma2_n(), scenario.n_samples);
      double penalty = 0.0;
      double min_db = std::numeric_limits<double>::infinity();
      bool ok = true;
      MatrixXcd Fc = F.leftCols(K);
      for (int k = 0; k < K; ++k) {
        double g = metrics::sinr(h[k], C, Fc, k, scenario.sigma2_k[k]);
        penalty += std::min(0.0, g - env_cfg.gamma_k[k]);
        double db = linear_to_db(g);
        sinr_sum[k] += db;
        min_db = std::min(min_db, db);
        ok = ok && g >= env_cfg.gamma_k[k];
      }
      reward_sum += gains.schur_core() + env_cfg.upsilon * penalty;
      min_sinr_sum += min_db;
      feasible += ok ? 1.0 : 0.0;
      ++count;
    }
  }
  EvalRecord r;
  r.strategy = Strategy::FpaRbf;
  r.seed = seed;
  r.snr_db = snr_db;
  r.region_wavelengths = (cfg.p_max_m - cfg.p_min_m) / cfg.wavelength();
  r.mean_crb_db = metrics::crb_db(crb_sum / count);
  for (double v : sinr_sum) r.sinr_db.push_back(v / count);
  r.min_sinr_db = min_sinr_sum / count;
  r.feasibility_rate = feasible / count;
  r.mean_reward = reward_sum / count;
  return r;
}

EvalRecord run_strategy(Strategy s, const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return evaluate_strategy(prepare_strategy(s, cfg, seed), cfg, cfg.train_snr_db);
}

td3::EvalSummary random_policy_baseline(const ExperimentConfig& cfg, Strategy s,
                                        std::uint64_t seed) {
  env::EnvConfig env_cfg = cfg.env_config(s, cfg.train_snr_db);
  Rng rng(mix_seed(seed, 0xBA5E));
  const env::ActionLayout layout = env_cfg.layout();
  return td3::evaluate_policy(
      [&](const VectorXd&) { return td3::uniform_random_action(layout, rng); }, env_cfg,
      evaluation_seeds(cfg, seed));
}

std::vector<SweepRow> SweepResult::averaged() const {
  std::vector<SweepRow> out;
  std::vector<int> counts;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepRow& o) {
      return o.x == r.x && o.strategy == r.strategy;
    });
    if (it == out.end()) {
      SweepRow a = r;
      a.seed = 0;
      out.push_back(a);
      counts.push_back(1);
    } else {
      auto i = static_cast<std::size_t>(it - out.begin());
      it->mean_crb_db += r.mean_crb_db;
      it->min_sinr_db += r.min_sinr_db;
      it->feasibility_rate += r.feasibility_rate;
      ++counts[i];
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].mean_crb_db /= counts[i];
    out[i].min_sinr_db /= counts[i];
    out[i].feasibility_rate /= counts[i];
  }
  return out;
}

namespace {

SweepRow to_row(double x, const EvalRecord& r) {
  return {x, r.strategy, r.seed, r.mean_crb_db, r.min_sinr_db, r.feasibility_rate};
}

}  // namespace

SweepResult snr_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Strategy> strategies;
  for (const auto& s : cfg.snr_strategies) strategies.push_back(parse_strategy(s));
  const int n_jobs = static_cast<int>(strategies.size() * cfg.seeds.size());
  const auto& grid = cfg.snr_grid_db;

  // results[job][snr index]
  std::vector<std::vector<EvalRecord>> results(n_jobs);
  std::vector<std::vector<td3::EpisodeLog>> logs(n_jobs);
  parallel_for(n_jobs, [&](int job) {
    Strategy s = strategies[job / cfg.seeds.size()];
    std::uint64_t seed = cfg.seeds[job % cfg.seeds.size()];
    if (cfg.retrain_per_snr && is_learned(s)) {
      for (double snr : grid) {
        ExperimentConfig c = cfg;
        c.train_snr_db = snr;
        PreparedStrategy p = prepare_strategy(s, c, seed);
        results[job].push_back(evaluate_strategy(p, c, snr));
        if (logs[job].empty()) logs[job] = p.training_log;
      }
    } else {
      PreparedStrategy p = prepare_strategy(s, cfg, seed);
      for (double snr : grid) results[job].push_back(evaluate_strategy(p, cfg, snr));
      logs[job] = std::move(p.training_log);
    }
  });

  SweepResult out;
  out.x_name = "snr_db";
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (int job = 0; job < n_jobs; ++job) out.rows.push_back(to_row(grid[i], results[job][i]));
  for (auto& l : logs) {
    if (!l.empty()) {
      out.first_training_log = std::move(l);
      break;
    }
  }
  return out;
}

SweepResult region_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<Strategy> strategies;
  for (const auto& s : cfg.region_strategies) strategies.push_back(parse_strategy(s));
  const auto& grid = cfg.region_grid_wavelengths;
  const int n_pairs = static_cast<int>(strategies.size() * cfg.seeds.size());

  std::vector<std::vector<EvalRecord>> results(n_pairs, std::vector<EvalRecord>(grid.size()));
  std::vector<std::vector<td3::EpisodeLog>> logs(n_pairs);
  auto pair_of = [&](int i) {
    return std::pair{strategies[i / cfg.seeds.size()], cfg.seeds[i % cfg.seeds.size()]};
  };

  if (cfg.region_fine_tune) {
    parallel_for(n_pairs, [&](int i) {
      auto [s, seed] = pair_of(i);
      std::optional<td3::Agent> previous;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        ExperimentConfig c = with_region(cfg, grid[g]);
        PreparedStrategy p = prepare_strategy(s, c, seed, previous ? &*previous : nullptr);
        results[i][g] = evaluate_strategy(p, c, c.train_snr_db);
        if (logs[i].empty()) logs[i] = p.training_log;
        previous = std::move(p.agent);
      }
    });
  } else {
    const int n_jobs = n_pairs * static_cast<int>(grid.size());
    parallel_for(n_jobs, [&](int job) {
      int i = job / static_cast<int>(grid.size());
      int g = job % static_cast<int>(grid.size());
      auto [s, seed] = pair_of(i);
      ExperimentConfig c = with_region(cfg, grid[g]);
      PreparedStrategy p = prepare_strategy(s, c, seed);
      results[i][g] = evaluate_strategy(p, c, c.train_snr_db);
      if (g == 0) logs[i] = std::move(p.training_log);
    });
  }

  SweepResult out;
  out.x_name = "region_lambda";
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (int i = 0; i < n_pairs; ++i) out.rows.push_back(to_row(grid[g], results[i][g]));
  for (auto& l : logs) {
    if (!l.empty()) {
      out.first_training_log = std::move(l);
      break;
    }
  }
  return out;
}

int worker_count() {
  if (const char* env = std::getenv("CRX_ISAC_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  int next = 0;
  int failed_index = n;
  std::exception_ptr failure;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i;
        {
          std::lock_guard lock(mu);
          if (next >= n) return;
          i = next++;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (i < failed_index) {
            failed_index = i;
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace crx::harness
