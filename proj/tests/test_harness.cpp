#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>

#include "crx/errors.hpp"
#include "crx/harness.hpp"

namespace crx::harness {
namespace {

ExperimentConfig tiny() {
  ExperimentConfig c = ExperimentConfig::desk();
  c.n_elements = 4;
  c.episodes = 6;
  c.warmup_episodes = 2;
  c.steps_per_episode = 5;
  c.batch_size = 8;
  c.actor_hidden = {16};
  c.critic_hidden = {16};
  c.eval_interval = 3;
  c.final_eval_window = 2;
  c.eval_scenarios = 2;
  c.rbf_draws = 200;
  c.snr_grid_db = {0.0, 5.0, 10.0};
  c.region_grid_wavelengths = {2.0, 4.0};
  return c;
}

TEST(Strategy, TagsRoundTrip) {
  for (Strategy s : all_strategies()) EXPECT_EQ(parse_strategy(to_string(s)), s);
  EXPECT_EQ(to_string(Strategy::CrMaTd3), "CR_MA_TD3");
  EXPECT_EQ(to_string(Strategy::FpaRbf), "FPA_RBF");
  EXPECT_THROW(parse_strategy("cr_ma_td3 "), ConfigError);
  EXPECT_FALSE(is_learned(Strategy::FpaRbf));
  EXPECT_TRUE(is_learned(Strategy::MaTd3));
}

TEST(Seeds, EvaluationScenariosDependOnlyOnRunSeed) {
  ExperimentConfig c = tiny();
  auto a = evaluation_seeds(c, 3);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a, evaluation_seeds(c, 3));
  EXPECT_NE(a, evaluation_seeds(c, 4));
}

TEST(RandomBeamforming, ReproducibleWithoutCrosstalk) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.crosstalk.enabled = false;
  c.rbf_draws = 10000;
  EvalRecord a = evaluate_random_beamforming(c, 5, 10.0);
  EvalRecord b = evaluate_random_beamforming(c, 5, 10.0);
  EXPECT_NEAR(a.mean_crb_db, b.mean_crb_db, 1e-12);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.strategy, Strategy::FpaRbf);
}

TEST(RunStrategy, RecordsAreComplete) {
  ExperimentConfig c = tiny();
  EvalRecord r = run_strategy(Strategy::CrMaTd3, c, 1);
  EXPECT_EQ(r.strategy, Strategy::CrMaTd3);
  EXPECT_EQ(r.sinr_db.size(), 2u);
  EXPECT_TRUE(std::isfinite(r.mean_crb_db));
  EXPECT_GE(r.feasibility_rate, 0.0);
  EXPECT_LE(r.feasibility_rate, 1.0);
  EXPECT_NEAR(r.region_wavelengths, 0.15 / c.wavelength(), 1e-9);
  EXPECT_EQ(run_strategy(Strategy::CrMaTd3, c, 1), r);
}

TEST(RunStrategy, UntrainedEvaluationIsAProtocolError) {
  PreparedStrategy p;
  p.strategy = Strategy::MaTd3;
  EXPECT_THROW(evaluate_strategy(p, tiny(), 10.0), ProtocolError);
}

TEST(RunStrategy, DegenerateRegionMakesMovableAndFixedCoincide) {
  ExperimentConfig c = tiny();
  c.p_max_m = c.p_min_m + (c.n_elements - 1) * c.d0_wavelengths * c.wavelength();
  EvalRecord ma = run_strategy(Strategy::CrMaTd3, c, 2);
  EvalRecord fpa = run_strategy(Strategy::FpaTd3, c, 2);
  EXPECT_DOUBLE_EQ(ma.mean_crb_db, fpa.mean_crb_db);
  EXPECT_EQ(ma.sinr_db, fpa.sinr_db);
}

TEST(Baseline, RandomPolicyIsDeterministic) {
  ExperimentConfig c = tiny();
  auto a = random_policy_baseline(c, Strategy::CrMaTd3, 3);
  auto b = random_policy_baseline(c, Strategy::CrMaTd3, 3);
  EXPECT_EQ(a.mean_reward, b.mean_reward);
  EXPECT_EQ(a.crb_db, b.crb_db);
}

TEST(SnrSweep, TrainOnceGivesUnitSlope) {
  ExperimentConfig c = tiny();
  c.snr_strategies = {"FPA_RBF", "CR_MA_TD3"};
  SweepResult s = snr_sweep(c);
  EXPECT_EQ(s.x_name, "snr_db");
  ASSERT_EQ(s.rows.size(), 6u);
  EXPECT_FALSE(s.first_training_log.empty());
  for (Strategy st : {Strategy::FpaRbf, Strategy::CrMaTd3}) {
    std::vector<SweepRow> rows;
    for (const auto& r : s.rows)
      if (r.strategy == st) rows.push_back(r);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      double slope = (rows[i].mean_crb_db - rows[i - 1].mean_crb_db) / (rows[i].x - rows[i - 1].x);
      if (st == Strategy::CrMaTd3) EXPECT_NEAR(slope, -1.0, 1e-9);
      else EXPECT_LT(slope, 0.0);  // fresh random draws per point
    }
  }
  auto avg = s.averaged();
  EXPECT_EQ(avg.size(), 6u);
}

TEST(RegionSweep, OneRowPerGridPoint) {
  ExperimentConfig c = tiny();
  SweepResult s = region_sweep(c);
  EXPECT_EQ(s.x_name, "region_lambda");
  ASSERT_EQ(s.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(s.rows[0].x, 2.0);
  EXPECT_DOUBLE_EQ(s.rows[1].x, 4.0);
  c.region_fine_tune = true;
  EXPECT_EQ(region_sweep(c).rows.size(), 2u);
}

TEST(RegionSweep, InfeasibleRegionRejectedBeforeTraining) {
  ExperimentConfig c = tiny();
  c.region_grid_wavelengths = {1.0};
  EXPECT_THROW(region_sweep(c), ConfigError);
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  setenv("CRX_ISAC_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3);
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, [&](int i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10,
                            [](int i) {
                              if (i == 7) throw ConfigError("boom");
                            }),
               ConfigError);
  unsetenv("CRX_ISAC_THREADS");
  EXPECT_GE(worker_count(), 1);
}

}  // namespace
}  // namespace crx::harness
