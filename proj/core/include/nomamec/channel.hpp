#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomamec/model.hpp"

namespace nomamec {

/// Monte-Carlo channel model. All dB values are power quantities,
/// converted with 10^(x/10).
struct ChannelConfig {
  double reference_snr_db = 8.0;
  /// meters
  double reference_distance = 1.0;
  double pathloss_exponent = 4.0;
  double noise_power_db = -50.0;
  /// meters; empty means 30, 32, 34, ...
  std::vector<double> distances;
  /// seconds
  double D1 = 2.0;
  double Delta = 0.25;
  /// joules
  double E_th = 5.0;
  double P_t_db = 5.0;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument.
  void validate(std::size_t users) const;

  double distance(UserIndex m) const;
  std::vector<double> deadlines(std::size_t users) const;
  /// Gain with the fading term replaced by its mean.
  double mean_gain(UserIndex m) const;
};

void to_json(nlohmann::json& j, const ChannelConfig& config);
void from_json(const nlohmann::json& j, ChannelConfig& config);

double db_to_linear(double db);

using Rng = std::mt19937_64;
inline constexpr std::string_view kRngName = "mt19937_64/splitmix64";

std::uint64_t splitmix64(std::uint64_t x);

/// Independent generator for one (seed, stream) pair, typically one trial.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Inverse CDF -ln(1 - u) of the unit-mean exponential, u in [0, 1).
double exponential_from_uniform(double u);

/// |h|^2 for h ~ CN(0, 1).
double exponential_unit_mean(Rng& rng);

Scenario draw_scenario(const ChannelConfig& config, std::size_t users, Rng& rng);

/// Uses make_rng(config.seed, stream).
Scenario draw_scenario(const ChannelConfig& config, std::size_t users, std::uint64_t stream = 0);

}  // namespace nomamec
