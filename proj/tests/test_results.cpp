#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "crx/errors.hpp"
#include "crx/results.hpp"

namespace crx::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("crx_results_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SweepResult sample_sweep() {
  SweepResult s;
  s.x_name = "snr_db";
  s.rows = {{0.0, Strategy::FpaRbf, 0, -30.123456789012345, -3.5, 0.25},
            {0.0, Strategy::CrMaTd3, 0, -41.0 / 3.0, 2.0, 1.0},
            {4.0, Strategy::FpaRbf, 0, -34.1, -1.0, 0.5},
            {4.0, Strategy::CrMaTd3, 0, -45.0, 6.0, 1.0},
            {0.0, Strategy::FpaRbf, 1, -30.5, -3.0, 0.0},
            {0.0, Strategy::CrMaTd3, 1, -40.0, 1.0, 1.0},
            {4.0, Strategy::FpaRbf, 1, -34.5, -0.5, 0.25},
            {4.0, Strategy::CrMaTd3, 1, -44.0, 5.0, 0.75}};
  return s;
}

TEST(SweepCsv, RoundTripIsExact) {
  fs::path dir = scratch("sweep");
  SweepResult s = sample_sweep();
  write_sweep_csv(dir / "s.csv", s, "0123456789abcdef");
  std::string text = slurp(dir / "s.csv");
  EXPECT_EQ(text.rfind("# config_hash=0123456789abcdef\n", 0), 0u);
  SweepResult back = read_sweep_csv(dir / "s.csv");
  EXPECT_EQ(back.x_name, "snr_db");
  EXPECT_EQ(back.rows, s.rows);
  fs::remove_all(dir);
}

TEST(SweepCsv, AveragedRows) {
  fs::path dir = scratch("avg");
  SweepResult s = sample_sweep();
  auto avg = s.averaged();
  ASSERT_EQ(avg.size(), 4u);
  EXPECT_DOUBLE_EQ(avg[0].mean_crb_db, (-30.123456789012345 - 30.5) / 2.0);
  EXPECT_DOUBLE_EQ(avg[3].mean_crb_db, -44.5);
  write_sweep_csv(dir / "m.csv", s, "ff", true);
  std::string text = slurp(dir / "m.csv");
  EXPECT_NE(text.find("\nsnr_db,strategy,mean_crb_db,min_sinr_db,feasibility_rate\n"),
            std::string::npos);
  EXPECT_THROW(read_sweep_csv(dir / "m.csv"), IoError);
  fs::remove_all(dir);
}

TEST(EvalCsv, RoundTripIsExact) {
  fs::path dir = scratch("eval");
  std::vector<EvalRecord> recs{
      {Strategy::MaTd3, 2, 10.0, 15.0, -44.2, {3.1, -0.4}, -0.4, 0.6, 0.123},
      {Strategy::FpaRbf, 2, 10.0, 15.0, -33.7, {1.0 / 3.0, 2.0}, 1.0 / 3.0, 0.0, -0.5}};
  write_eval_csv(dir / "e.csv", recs, "abc");
  EXPECT_EQ(read_eval_csv(dir / "e.csv"), recs);
  fs::remove_all(dir);
}

TEST(ReadCsv, MissingOrMalformedFiles) {
  fs::path dir = scratch("bad");
  EXPECT_THROW(read_sweep_csv(dir / "none.csv"), IoError);
  std::ofstream(dir / "junk.csv") << "# config_hash=1\nx,y\n1,2\n";
  EXPECT_THROW(read_sweep_csv(dir / "junk.csv"), IoError);
  fs::remove_all(dir);
}

TEST(PlotData, OneColumnPerStrategy) {
  fs::path dir = scratch("plot");
  write_plot_data(dir / "p.dat", sample_sweep());
  std::ifstream in(dir / "p.dat");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  ASSERT_EQ(lines.size(), 2u);
  std::istringstream row(lines[0]);
  double x, a, b;
  row >> x >> a >> b;
  EXPECT_DOUBLE_EQ(x, 0.0);
  EXPECT_NEAR(a, (-30.123456789012345 - 30.5) / 2.0, 1e-9);
  fs::remove_all(dir);
}

TEST(Manifest, RecordsOverridesSeedsAndReferences) {
  RunManifest m;
  m.command = "sweep-snr";
  m.config = ExperimentConfig::desk();
  m.config.gamma_db = 4.0;
  m.config.seeds = {1, 2};
  m.files = {"snr_sweep.csv"};
  nlohmann::json j = manifest_json(m);
  EXPECT_EQ(j["command"], "sweep-snr");
  EXPECT_EQ(j["profile"], "desk");
  EXPECT_EQ(j["overrides"]["gamma_db"], 4.0);
  EXPECT_EQ(j["overrides"]["seeds"], nlohmann::json({1, 2}));
  EXPECT_EQ(j["seeds"], nlohmann::json({1, 2}));
  EXPECT_EQ(j["config_hash"], config_hash(m.config));
  EXPECT_TRUE(j.contains("version"));
  EXPECT_TRUE(j.contains("wall_time_s"));
  EXPECT_EQ(j["files"], nlohmann::json({"snr_sweep.csv"}));
  EXPECT_EQ(j["config"].get<ExperimentConfig>().gamma_db, 4.0);
  ASSERT_TRUE(j.contains("reference_values"));
  std::string ref = j["reference_values"].dump();
  EXPECT_NE(ref.find("-63.8"), std::string::npos);
  EXPECT_NE(ref.find("-70.9"), std::string::npos);

  fs::path dir = scratch("manifest");
  write_manifest(dir / "manifest.json", m);
  std::ifstream in(dir / "manifest.json");
  EXPECT_EQ(nlohmann::json::parse(in), j);
  fs::remove_all(dir);
}

TEST(OutputDir, UnwritablePathIsAnIoError) {
  fs::path dir = scratch("dir");
  std::ofstream(dir / "file") << "x";
  EXPECT_THROW(ensure_output_dir(dir / "file" / "sub"), IoError);
  EXPECT_NO_THROW(ensure_output_dir(dir / "a" / "b"));
  EXPECT_TRUE(fs::is_directory(dir / "a" / "b"));
  EXPECT_THROW(write_sweep_csv(dir / "file" / "x.csv", sample_sweep(), "0"), IoError);
  fs::remove_all(dir);
}

TEST(Reproducibility, SameConfigSameBytes) {
  ExperimentConfig c = ExperimentConfig::desk();
  c.n_elements = 4;
  c.episodes = 5;
  c.warmup_episodes = 2;
  c.steps_per_episode = 4;
  c.batch_size = 8;
  c.actor_hidden = {8};
  c.critic_hidden = {8};
  c.eval_scenarios = 2;
  c.rbf_draws = 100;
  c.snr_grid_db = {0.0, 10.0};
  c.snr_strategies = {"FPA_RBF", "MA_TD3"};
  fs::path dir = scratch("repro");
  for (int run = 0; run < 2; ++run) {
    write_sweep_csv(dir / ("run" + std::to_string(run) + ".csv"), snr_sweep(c), config_hash(c));
  }
  std::string a = slurp(dir / "run0.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "run1.csv"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace crx::harness
