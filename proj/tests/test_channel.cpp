#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "crx/channel.hpp"
#include "crx/errors.hpp"
#include "crx/oracles.hpp"

namespace crx::channel {
namespace {

using array::AntennaPositions;

AntennaPositions two_elements(double d) {
  VectorXd v(2);
  v << 0.0, d;
  return AntennaPositions::unchecked(v);
}

AntennaPositions irregular(int n, Rng& rng, double d0 = 0.005) {
  std::uniform_real_distribution<double> gap(d0, 3 * d0);
  VectorXd v(n);
  v[0] = 0.0;
  for (int i = 1; i < n; ++i) v[i] = v[i - 1] + gap(rng);
  return AntennaPositions::unchecked(v);
}

TEST(Scenario, SameSeedSameScenario) {
  ScenarioConfig cfg;
  Rng a(42), b(42);
  EXPECT_EQ(sample_scenario(a, cfg), sample_scenario(b, cfg));
  Rng c(43);
  Rng d(42);
  EXPECT_NE(sample_scenario(c, cfg), sample_scenario(d, cfg));
}

TEST(Scenario, GainMomentsAndAngleRange) {
  ScenarioConfig cfg;
  cfg.n_users = 100;
  cfg.n_paths = 10;
  Rng rng(1);
  double power = 0.0, lo = 10.0, hi = -10.0;
  cd mean{0.0, 0.0};
  int count = 0;
  for (int r = 0; r < 100; ++r) {
    Scenario s = sample_scenario(rng, cfg);
    for (const auto& u : s.users) {
      for (int l = 0; l < u.n_paths(); ++l) {
        power += std::norm(u.gains[l]);
        mean += u.gains[l];
        lo = std::min(lo, u.angles[l]);
        hi = std::max(hi, u.angles[l]);
        ++count;
      }
    }
  }
  ASSERT_EQ(count, 100000);
  EXPECT_NEAR(power / count, 1.0, 0.02);
  EXPECT_LT(std::abs(mean / double(count)), 0.02);
  EXPECT_GE(lo, 0.0);
  EXPECT_LE(hi, kPi);
}

TEST(Scenario, CarriesConfiguredSensingParameters) {
  ScenarioConfig cfg;
  cfg.n_users = 3;
  cfg.noise_power = 2e-4;
  cfg.clutter_power = 1e-5;
  Rng rng(0);
  Scenario s = sample_scenario(rng, cfg);
  EXPECT_EQ(s.n_users(), 3);
  EXPECT_DOUBLE_EQ(s.theta_s, deg_to_rad(60.0));
  EXPECT_DOUBLE_EQ(s.sigma2_s, 2e-4);
  EXPECT_DOUBLE_EQ(s.sigma2_n(), 2e-4 + 1e-5);
  ASSERT_EQ(s.sigma2_k.size(), 3u);
  for (double v : s.sigma2_k) EXPECT_DOUBLE_EQ(v, 2e-4);
}

TEST(Scenario, ValidationRejectsBadFields) {
  Rng rng(0);
  Scenario s = sample_scenario(rng, ScenarioConfig{});
  Scenario bad = s;
  bad.sigma2_s = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.users[0].angles[0] = 4.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.sigma2_k.pop_back();
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = s;
  bad.n_samples = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Scenario, JsonRoundTripUsesDocumentedKeys) {
  Rng rng(9);
  ScenarioConfig cfg;
  cfg.clutter_power = 3e-6;
  Scenario s = sample_scenario(rng, cfg);
  nlohmann::json j = s;
  for (const char* key : {"users", "theta_s_rad", "alpha_s", "sigma2_s", "sigma2_c", "sigma2_k",
                          "crosstalk", "n_samples"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_TRUE(j["users"][0].contains("gains"));
  EXPECT_TRUE(j["users"][0].contains("angles_rad"));
  for (const char* key : {"eta", "iota", "nu", "xi", "enabled"}) {
    EXPECT_TRUE(j["crosstalk"].contains(key)) << key;
  }
  // Text round trip at full precision.
  Scenario back = nlohmann::json::parse(j.dump()).get<Scenario>();
  EXPECT_EQ(back, s);
}

TEST(Crosstalk, ValidationBounds) {
  CrosstalkParams c;
  EXPECT_NO_THROW(c.validate());
  c.eta = -1.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = CrosstalkParams{};
  c.iota = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Coupling, DisabledGivesIdentity) {
  Rng rng(2);
  CrosstalkParams c;
  c.enabled = false;
  MatrixXcd C = coupling_matrix(irregular(6, rng), c);
  EXPECT_TRUE(C.isApprox(MatrixXcd::Identity(6, 6), 0.0));
}

TEST(Coupling, HalfWavelengthEntry) {
  CrosstalkParams c;  // eta 3.5e-5, iota 1.9, nu 600.4, xi 252.8
  MatrixXcd C = coupling_matrix(two_elements(0.005), c);
  const double modulus = 3.5e-5 * std::pow(0.005, -1.9);
  EXPECT_NEAR(modulus, 0.824, 5e-4);
  EXPECT_NEAR(std::abs(C(0, 1)), modulus, 1e-12);
  double phase = std::remainder(-(600.4 * 0.005 + 252.8), 2.0 * kPi);
  EXPECT_NEAR(std::remainder(std::arg(C(0, 1)) - phase, 2.0 * kPi), 0.0, 1e-9);
  EXPECT_EQ(C(0, 0), cd(1.0, 0.0));
  EXPECT_EQ(C(1, 1), cd(1.0, 0.0));
}

TEST(Coupling, DoublingDistanceScalesByPowerLaw) {
  Rng rng(4);
  CrosstalkParams c;
  AntennaPositions p = irregular(5, rng);
  MatrixXcd C1 = coupling_matrix(p, c);
  MatrixXcd C2 = coupling_matrix(AntennaPositions::unchecked(2.0 * p.values()), c);
  for (int m = 0; m < 5; ++m)
    for (int n = 0; n < 5; ++n) {
      if (m != n) {
        EXPECT_NEAR(std::abs(C2(m, n)) / std::abs(C1(m, n)), std::pow(2.0, -1.9), 1e-12);
      }
    }
}

TEST(Coupling, SymmetricNotHermitian) {
  Rng rng(8);
  MatrixXcd C = coupling_matrix(irregular(8, rng), CrosstalkParams{});
  EXPECT_LT((C - C.transpose()).norm(), 1e-15);
  EXPECT_GT((C - C.adjoint()).norm(), 1e-3);
}

TEST(Coupling, ModulusDecreasesWithDistance) {
  CrosstalkParams c;
  double prev = 1e300;
  for (double d = 0.001; d < 0.2; d *= 1.3) {
    double m = std::abs(coupling_matrix(two_elements(d), c)(0, 1));
    EXPECT_LT(m, prev);
    prev = m;
  }
}

TEST(Coupling, CoincidentElementsThrow) {
  VectorXd v(3);
  v << 0.0, 0.01, 0.01;
  EXPECT_THROW(coupling_matrix(AntennaPositions::unchecked(v), CrosstalkParams{}),
               GeometryError);
}

TEST(UserChannel, SinglePathBroadsideIsOnes) {
  Rng rng(0);
  AntennaPositions p = irregular(6, rng);
  UserChannelSpec spec{VectorXcd::Ones(1), VectorXd::Constant(1, kPi / 2.0)};
  VectorXcd h = user_channel(p, spec, 0.01);
  EXPECT_LT((h - VectorXcd::Ones(6)).norm(), 1e-14);
}

TEST(UserChannel, OpposingPathsCancel) {
  Rng rng(0);
  AntennaPositions p = irregular(6, rng);
  VectorXcd g(2);
  g << 1.0, -1.0;
  UserChannelSpec spec{g, VectorXd::Constant(2, 0.7)};
  EXPECT_LT(user_channel(p, spec, 0.01).norm(), 1e-15);
}

TEST(UserChannel, MeanPowerIsN) {
  Rng rng(12);
  const int N = 8;
  AntennaPositions p = irregular(N, rng);
  ScenarioConfig cfg;
  cfg.n_users = 1;
  cfg.n_paths = 3;
  double sum = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    Scenario s = sample_scenario(rng, cfg);
    sum += user_channel(p, s.users[0], 0.01).squaredNorm();
  }
  EXPECT_NEAR(sum / draws / N, 1.0, 0.03);
}

TEST(UserChannel, MatchesDirectSum) {
  Rng rng(21);
  AntennaPositions p = irregular(5, rng);
  ScenarioConfig cfg;
  cfg.n_users = 1;
  Scenario s = sample_scenario(rng, cfg);
  const auto& u = s.users[0];
  VectorXcd ref = VectorXcd::Zero(5);
  for (int l = 0; l < u.n_paths(); ++l)
    ref += u.gains[l] * oracles::steering(p.values(), u.angles[l], 0.01);
  ref *= std::sqrt(5.0 / u.n_paths());
  EXPECT_LT(oracles::relative_error(user_channel(p, u, 0.01), ref), 1e-14);
}

TEST(SensingChannel, IdentityCouplingReproducesSteering) {
  Rng rng(3);
  AntennaPositions p = irregular(7, rng);
  auto s = effective_sensing_channel(p, MatrixXcd::Identity(7, 7), 1.0, 0.01);
  EXPECT_EQ(s.g, array::steering_vector(p, 1.0, 0.01));
  EXPECT_EQ(s.g_dot, array::steering_derivative(p, 1.0, 0.01));
}

TEST(SensingChannel, DerivativeMatchesFiniteDifference) {
  Rng rng(6);
  std::uniform_real_distribution<double> angle(0.1, kPi - 0.1);
  for (int i = 0; i < 50; ++i) {
    AntennaPositions p = irregular(8, rng);
    MatrixXcd C = coupling_matrix(p, CrosstalkParams{});
    double th = angle(rng);
    auto s = effective_sensing_channel(p, C, th, 0.01);
    VectorXcd fd = oracles::central_difference(
        [&](double t) -> VectorXcd { return C.adjoint() * oracles::steering(p.values(), t, 0.01); },
        th, 1e-6);
    EXPECT_LT(oracles::relative_error(s.g_dot, fd), 1e-5);
  }
}

TEST(SensingChannel, EndfireDerivativeVanishes) {
  Rng rng(3);
  AntennaPositions p = irregular(4, rng);
  auto s = effective_sensing_channel(p, coupling_matrix(p, CrosstalkParams{}), 0.0, 0.01);
  EXPECT_LT(s.g_dot.norm(), 1e-15);
}

}  // namespace
}  // namespace crx::channel
