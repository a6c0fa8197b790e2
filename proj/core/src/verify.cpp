#include "crx/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "crx/env.hpp"
#include "crx/oracles.hpp"
#include "crx/results.hpp"

namespace crx::verify {

namespace {

using harness::Strategy;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

CriterionResult finish(int id, std::string name, bool passed, std::string detail,
                       const Timer& t, double budget_s = 0.0) {
  CriterionResult r{id, std::move(name), passed, std::move(detail), t.seconds()};
  if (budget_s > 0.0 && r.seconds > budget_s) {
    r.passed = false;
    r.detail += fmt("; runtime %.2f s exceeds %.0f s", r.seconds, budget_s);
  }
  return r;
}

constexpr double kWavelength = kSpeedOfLight / 30e9;
constexpr double kPower = 0.01;

template <class T>
T pick(const std::vector<T>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

cd complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  return {n(rng), n(rng)};
}

/// Random feasible geometry, coupling and full-power precoder.
struct Instance {
  array::ArrayConfig array;
  array::AntennaPositions positions;
  MatrixXcd C;
  metrics::Precoder precoder;
  double theta = 0.0;
  cd alpha;
  double sigma2 = 0.0;
  int n_samples = 128;
};

Instance random_instance(Rng& rng, int N, int K) {
  Instance in;
  in.array.n_elements = N;
  in.array.wavelength = kWavelength;
  in.array.d0 = kWavelength / 2.0;
  in.array.p_min = 0.0;
  in.array.p_max = std::max(0.15, 2.0 * (N - 1) * in.array.d0);

  std::exponential_distribution<double> expo(1.0);
  VectorXd parts(N + 1);
  for (auto& v : parts) v = expo(rng);
  VectorXd delta = parts.head(N) / parts.sum() * in.array.max_displacement();
  in.positions = array::displacements_to_positions(array::DisplacementVector(delta), in.array);
  in.C = channel::coupling_matrix(in.positions, channel::CrosstalkParams{});

  MatrixXcd F(N, N + K);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = complex_normal(rng, 1.0);
  F *= std::sqrt(kPower / F.squaredNorm());
  in.precoder = metrics::Precoder{F, kPower, K};

  std::uniform_real_distribution<double> angle(0.3, kPi - 0.3);
  std::uniform_real_distribution<double> log_noise(-4.0, -2.0);
  in.theta = angle(rng);
  in.alpha = complex_normal(rng, 0.16);
  in.sigma2 = std::pow(10.0, log_noise(rng));
  return in;
}

const std::vector<int> kElements{4, 8, 16};
const std::vector<int> kUsers{1, 2, 4};

}  // namespace

std::string format(const CriterionResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%.2f s)", r.seconds);
  return "CRITERION " + std::to_string(r.id) + (r.passed ? " PASS " : " FAIL ") + r.name + ": " +
         r.detail + buf;
}

CriterionResult crb_fim_equivalence(std::uint64_t seed, int instances) {
  Timer t;
  Rng rng(mix_seed(seed, 1));
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    Instance in = random_instance(rng, pick(kElements, rng), pick(kUsers, rng));
    auto s = channel::effective_sensing_channel(in.positions, in.C, in.theta, kWavelength);
    double crb = metrics::crb_theta(s.g, s.g_dot, in.precoder, in.alpha, in.sigma2, in.n_samples);
    Eigen::Matrix3d M =
        metrics::fisher_matrix(s.g, s.g_dot, in.precoder, in.alpha, in.sigma2, in.n_samples).M;
    // Equilibrate before inverting; the theta and alpha blocks differ in
    // scale by (2 pi p / lambda)^2.
    Eigen::Vector3d d = M.diagonal().cwiseSqrt().cwiseInverse();
    Eigen::Matrix3d scaled = d.asDiagonal() * M * d.asDiagonal();
    Eigen::Matrix3d inv = d.asDiagonal() * scaled.fullPivLu().inverse() * d.asDiagonal();
    worst = std::max(worst, std::abs(crb - inv(0, 0)) / inv(0, 0));
  }
  return finish(1, "crb_fim_equivalence", worst < 1e-8,
                fmt("%.0f instances, max relative error %.3e (< 1e-8)", instances, worst), t, 5.0);
}

CriterionResult likelihood_fim(std::uint64_t seed, int instances) {
  Timer t;
  Rng rng(mix_seed(seed, 2));
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int N = pick(kElements, rng);
    const int K = pick(kUsers, rng);
    Instance in = random_instance(rng, N, K);
    oracles::SensingModel m{in.positions.values(), in.C, in.precoder.F,
                            oracles::dft_pilots(N + K, in.n_samples), kWavelength, in.sigma2};
    Eigen::Matrix3d ref = oracles::likelihood_fim(m, in.theta, in.alpha);
    auto s = channel::effective_sensing_channel(in.positions, in.C, in.theta, kWavelength);
    Eigen::Matrix3d M =
        metrics::fisher_matrix(s.g, s.g_dot, in.precoder, in.alpha, in.sigma2, in.n_samples).M;
    worst = std::max(worst, oracles::fim_relative_error(M, ref, 1e-6));
  }
  return finish(2, "likelihood_fim", worst < 1e-4,
                fmt("%.0f instances, max entrywise relative error %.3e (< 1e-4)", instances,
                    worst),
                t, 30.0);
}

CriterionResult derivative_oracles(std::uint64_t seed, int instances) {
  Timer t;
  Rng rng(mix_seed(seed, 3));
  double worst_a = 0.0, worst_g = 0.0;
  for (int i = 0; i < instances; ++i) {
    Instance in = random_instance(rng, pick(kElements, rng), 1);
    const VectorXd& p = in.positions.values();
    auto a = [&](double th) { return oracles::steering(p, th, kWavelength); };
    auto g = [&](double th) -> VectorXcd { return in.C.adjoint() * a(th); };
    VectorXcd fd_a = oracles::central_difference(a, in.theta, 1e-6);
    VectorXcd fd_g = oracles::central_difference(g, in.theta, 1e-6);
    worst_a = std::max(worst_a, oracles::relative_error(
                                    array::steering_derivative(in.positions, in.theta, kWavelength),
                                    fd_a));
    auto s = channel::effective_sensing_channel(in.positions, in.C, in.theta, kWavelength);
    worst_g = std::max(worst_g, oracles::relative_error(s.g_dot, fd_g));
  }
  return finish(3, "derivative_oracles", worst_a < 1e-5 && worst_g < 1e-5,
                fmt("%.0f pairs, steering derivative %.3e, g_dot %.3e (< 1e-5)", instances,
                    worst_a, worst_g),
                t, 2.0);
}

CriterionResult sinr_monte_carlo(std::uint64_t seed, int instances, int symbols) {
  Timer t;
  Rng rng(mix_seed(seed, 4));
  double worst = 0.0;
  for (int i = 0; i < instances; ++i) {
    const int N = pick(kElements, rng);
    const int K = std::max(2, pick(kUsers, rng));
    Instance in = random_instance(rng, N, K);
    channel::ScenarioConfig sc;
    sc.n_users = K;
    sc.n_paths = 3;
    channel::Scenario scenario = channel::sample_scenario(rng, sc);
    std::uniform_int_distribution<int> user(0, K - 1);
    const int k = user(rng);
    VectorXcd h = channel::user_channel(in.positions, scenario.users[k], kWavelength);
    MatrixXcd Fc = in.precoder.fc();
    double closed = metrics::sinr(h, in.C, Fc, k, in.sigma2);
    double simulated = oracles::simulated_sinr(h, in.C, Fc, k, in.sigma2, symbols, rng);
    worst = std::max(worst, std::abs(closed - simulated) / closed);
  }
  return finish(4, "sinr_monte_carlo", worst < 0.015,
                fmt("%.0f instances at %.0f symbols, max relative error %.4f (< 0.015)",
                    instances, symbols, worst),
                t, 60.0);
}

CriterionResult feasibility(std::uint64_t seed, int actions) {
  Timer t;
  Rng rng(mix_seed(seed, 5));
  harness::ExperimentConfig desk = harness::ExperimentConfig::desk();
  harness::ExperimentConfig paper = harness::ExperimentConfig::paper();
  const std::vector<env::EnvConfig> envs{desk.env_config(Strategy::CrMaTd3, 10.0),
                                         paper.env_config(Strategy::CrMaTd3, 10.0)};
  const std::vector<double> scales{0.1, 1.0, 10.0, 100.0};
  constexpr double kGeomTol = 1e-12;
  int violations = 0;
  double worst_power = 0.0;
  for (int i = 0; i < actions; ++i) {
    const env::EnvConfig& e = envs[i % envs.size()];
    std::normal_distribution<double> normal(0.0, pick(scales, rng));
    VectorXd raw(e.layout().dim());
    for (auto& v : raw) v = normal(rng);
    env::Decoded d = env::decode_action({raw}, e);
    const VectorXd& p = d.positions.values();
    bool ok = p.size() == e.array.n_elements;
    for (Eigen::Index m = 0; ok && m < p.size(); ++m) {
      ok = p[m] >= e.array.p_min - kGeomTol && p[m] <= e.array.p_max + kGeomTol;
      for (Eigen::Index n = 0; ok && n < m; ++n)
        ok = std::abs(p[m] - p[n]) >= e.array.d0 - kGeomTol;
    }
    double power_err = std::abs(d.precoder.F.squaredNorm() - e.p_sum);
    worst_power = std::max(worst_power, power_err);
    if (!ok || power_err > 1e-9) ++violations;
  }
  return finish(5, "feasibility", violations == 0,
                fmt("%.0f raw actions, %.0f violations, max |trace(FF^H) - P| %.3e", actions,
                    violations, worst_power),
                t, 5.0);
}

CriterionResult snr_linearity(std::uint64_t seed) {
  Timer t;
  harness::ExperimentConfig cfg = harness::ExperimentConfig::desk();
  Rng rng(mix_seed(seed, 6));
  VectorXd raw(cfg.env_config(Strategy::CrMaTd3, 0.0).layout().dim());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& v : raw) v = normal(rng);

  std::vector<double> snr, crb;
  for (double s = 0.0; s <= 20.0; s += 2.0) {
    env::EnvConfig e = cfg.env_config(Strategy::CrMaTd3, s);
    auto scenario = env::reset(seed, e).second;
    env::Decoded d = env::decode_action({raw}, e);
    snr.push_back(s);
    crb.push_back(env::evaluate(d, scenario, e).crb_db);
  }
  // Least-squares slope and the largest deviation of any chord slope.
  const double n = static_cast<double>(snr.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < snr.size(); ++i) {
    mx += snr[i] / n;
    my += crb[i] / n;
  }
  double sxy = 0, sxx = 0, worst = 0;
  for (std::size_t i = 0; i < snr.size(); ++i) {
    sxy += (snr[i] - mx) * (crb[i] - my);
    sxx += (snr[i] - mx) * (snr[i] - mx);
    if (i > 0) {
      double chord = (crb[i] - crb[i - 1]) / (snr[i] - snr[i - 1]);
      worst = std::max(worst, std::abs(chord + 1.0));
    }
  }
  double slope = sxy / sxx;
  double dev = std::max(worst, std::abs(slope + 1.0));
  return finish(6, "snr_linearity", dev <= 1e-9,
                fmt("slope %.12f over 0..20 dB, max deviation %.3e (<= 1e-9)", slope, dev), t);
}

CriterionResult network_gradients(std::uint64_t seed) {
  Timer t;
  Rng rng(mix_seed(seed, 7));
  using nn::Activation;
  const std::vector<Activation> tags{Activation::Identity, Activation::Relu,
                                     Activation::Tanh,     Activation::Sigmoid,
                                     Activation::Softmax,  Activation::GatedSoftmax};
  std::vector<nn::DenseNetwork> nets;
  for (Activation hidden : tags) {
    for (Activation head : tags) {
      nets.push_back(nn::DenseNetwork::mlp(5, {7}, hidden, 4, {{0, 4, head}}, rng, 0.5));
    }
  }
  // Actor-shaped network with the mixed terminal segments.
  env::ActionLayout layout{3, 2};
  nets.push_back(nn::DenseNetwork::mlp(5, {8, 6}, Activation::Relu, layout.dim(),
                                       layout.terminal_segments(), rng, 0.5));

  double worst = 0.0;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const auto& net : nets) {
    MatrixXd x(net.input_dim(), 3), w(net.output_dim(), 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = unit(rng);
    nn::ForwardCache cache;
    net.forward(x, cache);
    nn::Backprop bp = net.backward(cache, w);
    oracles::NetworkGradients fd = oracles::network_fd_gradients(net, x, w, 1e-6);
    worst = std::max(worst, oracles::relative_error(bp.param_grad, fd.params));
    worst = std::max(worst, (bp.input_grad - fd.inputs).norm() / fd.inputs.norm());
  }
  return finish(7, "network_gradients", worst < 1e-4,
                fmt("%.0f networks over all 6 activation tags, max relative error %.3e (< 1e-4)",
                    static_cast<double>(nets.size()), worst),
                t, 10.0);
}

const harness::PreparedStrategy& StrategyCache::get(Strategy s, std::uint64_t seed) {
  auto key = std::pair{s, seed};
  auto it = cache_.find(key);
  if (it == cache_.end()) it = cache_.emplace(key, harness::prepare_strategy(s, cfg_, seed)).first;
  return it->second;
}

CriterionResult learning_signal(StrategyCache& cache, const std::vector<std::uint64_t>& seeds) {
  Timer t;
  const auto& cfg = cache.config();
  bool all = true;
  std::string detail;
  for (std::uint64_t seed : seeds) {
    const auto& p = cache.get(Strategy::CrMaTd3, seed);
    double sum = 0.0;
    int n = 0;
    for (const auto& row : p.training_log) {
      if (row.eval && row.episode >= cfg.episodes - cfg.final_eval_window) {
        sum += row.eval->mean_reward;
        ++n;
      }
    }
    double learned = n > 0 ? sum / n : 0.0;
    double random = harness::random_policy_baseline(cfg, Strategy::CrMaTd3, seed).mean_reward;
    bool ok = n > 0 && learned >= 2.0 * random;
    all = all && ok;
    detail += fmt("seed %.0f: %.4f vs random %.4f; ", static_cast<double>(seed), learned, random);
  }
  detail += "need >= 2x on every seed";
  return finish(8, "learning_signal", all, detail, t);
}

CriterionResult strategy_ordering(StrategyCache& cache, const std::vector<std::uint64_t>& seeds,
                                  int required) {
  Timer t;
  const auto& cfg = cache.config();
  int ordered = 0;
  double sum[4] = {0, 0, 0, 0};
  for (std::uint64_t seed : seeds) {
    double cr = harness::evaluate_strategy(cache.get(Strategy::CrMaTd3, seed), cfg,
                                           cfg.train_snr_db)
                    .mean_crb_db;
    double ma = harness::evaluate_strategy(cache.get(Strategy::MaTd3, seed), cfg,
                                           cfg.train_snr_db)
                    .mean_crb_db;
    double fpa = harness::evaluate_strategy(cache.get(Strategy::FpaTd3, seed), cfg,
                                            cfg.train_snr_db)
                     .mean_crb_db;
    double rbf = harness::evaluate_random_beamforming(cfg, seed, cfg.train_snr_db).mean_crb_db;
    if (cr <= ma && ma <= fpa && fpa <= rbf) ++ordered;
    sum[0] += cr;
    sum[1] += ma;
    sum[2] += fpa;
    sum[3] += rbf;
  }
  const double n = static_cast<double>(seeds.size());
  std::string detail = fmt("%.0f of %.0f seeds ordered (need %.0f); ", ordered, n, required) +
                       fmt("mean CRB dB CR_MA_TD3 %.2f, MA_TD3 %.2f, FPA_TD3 %.2f, ",
                           sum[0] / n, sum[1] / n, sum[2] / n) +
                       fmt("FPA_RBF %.2f", sum[3] / n);
  return finish(9, "strategy_ordering", ordered >= required, detail, t);
}

CriterionResult region_monotonicity(const harness::ExperimentConfig& base,
                                    const std::vector<std::uint64_t>& seeds) {
  Timer t;
  harness::ExperimentConfig cfg = base;
  cfg.seeds = seeds;
  cfg.region_strategies = {"CR_MA_TD3"};
  harness::SweepResult sweep = harness::region_sweep(cfg);
  auto avg = sweep.averaged();
  int inversions = 0;
  std::string curve;
  for (std::size_t i = 0; i < avg.size(); ++i) {
    curve += fmt("%.1f:%.2f ", avg[i].x, avg[i].mean_crb_db);
    if (i > 0 && avg[i].mean_crb_db > avg[i - 1].mean_crb_db) ++inversions;
  }
  return finish(10, "region_monotonicity", inversions <= 1,
                fmt("%.0f adjacent inversions (<= 1) over %.0f seeds; ", inversions,
                    static_cast<double>(seeds.size())) +
                    "lambda:CRB dB " + curve,
                t);
}

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

CriterionResult determinism(const harness::ExperimentConfig& cfg, std::uint64_t seed,
                            const std::filesystem::path& workdir) {
  Timer t;
  harness::ensure_output_dir(workdir);
  harness::ExperimentConfig c = cfg;
  c.seeds = {seed};
  const std::string hash = harness::config_hash(c);
  for (int run = 0; run < 2; ++run) {
    const auto dir = workdir / ("run" + std::to_string(run));
    harness::ensure_output_dir(dir);
    auto prepared = harness::prepare_strategy(harness::parse_strategy(c.strategy), c, seed);
    std::ofstream log(dir / "training_log.csv", std::ios::binary);
    td3::write_training_log(log, prepared.training_log);
    log.close();
    harness::write_sweep_csv(dir / "snr_sweep.csv", harness::snr_sweep(c), hash);
  }
  bool same = true;
  std::string detail;
  for (const char* name : {"training_log.csv", "snr_sweep.csv"}) {
    std::string a = slurp(workdir / "run0" / name);
    std::string b = slurp(workdir / "run1" / name);
    bool eq = !a.empty() && a == b;
    same = same && eq;
    detail += std::string(name) + (eq ? " identical" : " differs") +
              fmt(" (%.0f bytes); ", static_cast<double>(a.size()));
  }
  detail += "seed " + std::to_string(seed);
  return finish(11, "determinism", same, detail, t);
}

std::vector<CriterionResult> run_numerical(std::uint64_t seed) {
  return {crb_fim_equivalence(seed), likelihood_fim(seed),   derivative_oracles(seed),
          sinr_monte_carlo(seed),    feasibility(seed),      snr_linearity(seed),
          network_gradients(seed)};
}

std::vector<CriterionResult> run_learning(const harness::ExperimentConfig& cfg,
                                          const std::filesystem::path& workdir,
                                          const std::function<void(const CriterionResult&)>& report) {
  StrategyCache cache(cfg);
  const std::vector<std::uint64_t> three{0, 1, 2};
  const std::vector<std::uint64_t> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<CriterionResult> out;
  auto add = [&](CriterionResult r) {
    if (report) report(r);
    out.push_back(std::move(r));
  };
  add(learning_signal(cache, three));
  add(strategy_ordering(cache, ten, 8));
  add(region_monotonicity(cfg, three));
  add(determinism(cfg, 0, workdir / "determinism"));
  return out;
}

}  // namespace crx::verify
