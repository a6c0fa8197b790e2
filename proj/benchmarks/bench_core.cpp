#include <benchmark/benchmark.h>

#include "crx/channel.hpp"
#include "crx/env.hpp"
#include "crx/experiment_config.hpp"
#include "crx/metrics.hpp"
#include "crx/nn.hpp"
#include "crx/td3.hpp"

using namespace crx;

namespace {

harness::ExperimentConfig sized(int n) {
  harness::ExperimentConfig c = harness::ExperimentConfig::paper();
  c.n_elements = n;
  c.p_max_m = c.p_min_m + 4.0 * n * c.wavelength();
  return c;
}

void BM_CouplingMatrix(benchmark::State& st) {
  env::EnvConfig e = sized(static_cast<int>(st.range(0))).env_config(harness::Strategy::CrMaTd3, 10.0);
  auto p = array::AntennaPositions::uniform(e.array);
  for (auto _ : st) benchmark::DoNotOptimize(channel::coupling_matrix(p, e.scenario.crosstalk));
}
BENCHMARK(BM_CouplingMatrix)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_CrbTheta(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  env::EnvConfig e = sized(n).env_config(harness::Strategy::CrMaTd3, 10.0);
  auto p = array::AntennaPositions::uniform(e.array);
  MatrixXcd C = channel::coupling_matrix(p, e.scenario.crosstalk);
  auto s = channel::effective_sensing_channel(p, C, e.scenario.theta_s, e.array.wavelength);
  metrics::Precoder F{MatrixXcd::Random(n, e.scenario.n_users + n), 1.0, e.scenario.n_users};
  F.F *= std::sqrt(F.p_sum) / F.F.norm();
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        metrics::crb_theta(s.g, s.g_dot, F, e.scenario.alpha_s, 1e-3, e.scenario.n_samples));
  }
}
BENCHMARK(BM_CrbTheta)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_EnvStep(benchmark::State& st) {
  env::EnvConfig e = sized(static_cast<int>(st.range(0))).env_config(harness::Strategy::CrMaTd3, 10.0);
  auto [state, scenario] = env::reset(1, e);
  Rng rng(2);
  VectorXd raw = VectorXd::Random(e.layout().dim());
  for (auto _ : st) benchmark::DoNotOptimize(env::step(state, {raw}, scenario, e, 0));
}
BENCHMARK(BM_EnvStep)->Arg(8)->Arg(16);

nn::DenseNetwork bench_net(int in, int out, Rng& rng) {
  return nn::DenseNetwork::mlp(in, {256, 256}, nn::Activation::Relu, out,
                               {{0, out, nn::Activation::Tanh}}, rng);
}

void BM_NetworkForward(benchmark::State& st) {
  Rng rng(3);
  auto net = bench_net(400, 400, rng);
  MatrixXd x = MatrixXd::Random(400, st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(net.forward(x));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_NetworkForward)->Arg(1)->Arg(64)->Arg(256);

void BM_NetworkBackward(benchmark::State& st) {
  Rng rng(4);
  auto net = bench_net(400, 400, rng);
  MatrixXd x = MatrixXd::Random(400, st.range(0));
  nn::ForwardCache cache;
  MatrixXd y = net.forward(x, cache);
  MatrixXd up = MatrixXd::Ones(y.rows(), y.cols());
  for (auto _ : st) benchmark::DoNotOptimize(net.backward(cache, up));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_NetworkBackward)->Arg(64)->Arg(256);

void BM_CriticUpdate(benchmark::State& st) {
  harness::ExperimentConfig c = harness::ExperimentConfig::desk();
  env::EnvConfig e = c.env_config(harness::Strategy::CrMaTd3, 10.0);
  td3::Agent agent(e.state_dim(), e.layout(), c.td3_config(), 5);
  const int b = static_cast<int>(st.range(0));
  td3::Batch batch{MatrixXd::Random(e.state_dim(), b), MatrixXd::Random(e.layout().dim(), b),
                   VectorXd::Random(b), MatrixXd::Random(e.state_dim(), b), VectorXd::Zero(b)};
  for (auto _ : st) benchmark::DoNotOptimize(agent.critic_update(batch));
  st.SetItemsProcessed(st.iterations() * b);
}
BENCHMARK(BM_CriticUpdate)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
