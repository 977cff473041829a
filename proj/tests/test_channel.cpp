#include <cmath>

#include <gtest/gtest.h>

#include "nomamec/channel.hpp"

namespace {

using namespace nomamec;

TEST(Channel, MeanGainAtThirtyMeters) {
  ChannelConfig c;
  // 10^0.8 * 30^-4 / 10^-5
  EXPECT_NEAR(c.mean_gain(0), 0.7789596845434485, 1e-12);
  EXPECT_DOUBLE_EQ(c.distance(3), 36.0);
  EXPECT_DOUBLE_EQ(db_to_linear(10.0), 10.0);
  EXPECT_DOUBLE_EQ(db_to_linear(-50.0), 1e-5);
}

TEST(Channel, DeadlineGrid) {
  ChannelConfig c;
  EXPECT_EQ(c.deadlines(4), (std::vector<double>{2.0, 2.25, 2.5, 2.75}));
  c.Delta = 0;
  EXPECT_EQ(c.deadlines(3), (std::vector<double>{2.0, 2.0, 2.0}));
  EXPECT_NO_THROW(draw_scenario(c, 3));
}

TEST(Channel, SameSeedSameScenario) {
  ChannelConfig c;
  c.seed = 99;
  const Scenario a = draw_scenario(c, 5, 3), b = draw_scenario(c, 5, 3);
  EXPECT_TRUE(std::equal(a.gains().begin(), a.gains().end(), b.gains().begin()));
  const Scenario other = draw_scenario(c, 5, 4);
  EXPECT_NE(a.gain(0), other.gain(0));
  EXPECT_DOUBLE_EQ(a.power_budget(), db_to_linear(c.P_t_db));
  EXPECT_DOUBLE_EQ(a.energy_budget(), c.E_th);
}

TEST(Channel, PrefixStableAcrossUserCounts) {
  ChannelConfig c;
  const Scenario small = draw_scenario(c, 2, 7), large = draw_scenario(c, 6, 7);
  EXPECT_EQ(small.gain(0), large.gain(0));
  EXPECT_EQ(small.gain(1), large.gain(1));
}

TEST(Exponential, InverseCdf) {
  EXPECT_EQ(exponential_from_uniform(0.0), 0.0);
  EXPECT_NEAR(exponential_from_uniform(1.0 - std::exp(-1.0)), 1.0, 1e-15);
}

TEST(Exponential, EmpiricalMean) {
  Rng rng = make_rng(42, 0);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = exponential_unit_mean(rng);
    ASSERT_GE(x, 0.0);
    sum += x;
  }
  EXPECT_GE(sum / n, 0.99);
  EXPECT_LE(sum / n, 1.01);
}

TEST(Channel, GainMeanOverDraws) {
  ChannelConfig c;
  c.seed = 5;
  double sum[3] = {0, 0, 0};
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const Scenario s = draw_scenario(c, 3, static_cast<std::uint64_t>(t));
    for (std::size_t m = 0; m < 3; ++m) {
      ASSERT_GE(s.gain(m), 0.0);
      sum[m] += s.gain(m);
    }
  }
  for (std::size_t m = 0; m < 3; ++m) EXPECT_NEAR(sum[m] / n / c.mean_gain(m), 1.0, 0.03) << m;
}

TEST(Channel, Validation) {
  ChannelConfig c;
  EXPECT_THROW(c.validate(0), std::invalid_argument);
  c.distances = {30, 0.5};
  EXPECT_THROW(c.validate(2), std::invalid_argument);
  c.distances = {30};
  EXPECT_THROW(c.validate(2), std::invalid_argument);
  c = {};
  c.D1 = 0;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
  c = {};
  c.Delta = -1;
  EXPECT_THROW(c.validate(1), std::invalid_argument);
}

TEST(Channel, JsonRoundTrip) {
  ChannelConfig c;
  c.E_th = 12;
  c.P_t_db = 7;
  c.seed = 123456789012345ULL;
  c.distances = {40, 50};
  const nlohmann::json j = c;
  for (const char* key : {"reference_snr_db", "reference_distance", "pathloss_exponent", "noise_power_db", "distances",
                          "D1", "Delta", "E_th", "P_t_db", "seed"})
    EXPECT_TRUE(j.contains(key)) << key;
  const auto back = j.get<ChannelConfig>();
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.distances, c.distances);
  EXPECT_EQ(back.E_th, 12);
  EXPECT_EQ(nlohmann::json::parse(R"({"P_t_db": 3})").get<ChannelConfig>().reference_snr_db, 8.0);
  EXPECT_THROW(nlohmann::json::parse(R"({"snr": 3})").get<ChannelConfig>(), std::invalid_argument);
}

}  // namespace
