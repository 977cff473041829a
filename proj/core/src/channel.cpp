#include "nomamec/channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nomamec {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void ChannelConfig::validate(std::size_t users) const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("channel config: " + what); };
  if (users == 0) fail("user count must be positive");
  if (!std::isfinite(reference_snr_db)) fail("reference_snr_db must be finite");
  if (!(reference_distance > 0.0)) fail("reference_distance must be positive");
  if (!(pathloss_exponent >= 0.0)) fail("pathloss_exponent must be nonnegative");
  if (!std::isfinite(noise_power_db)) fail("noise_power_db must be finite");
  if (!(D1 > 0.0)) fail("D1 must be positive");
  if (!(Delta >= 0.0)) fail("Delta must be nonnegative");
  if (!(E_th >= 0.0)) fail("E_th must be nonnegative");
  if (!std::isfinite(P_t_db)) fail("P_t_db must be finite");
  if (!distances.empty() && distances.size() < users)
    fail("distances has " + std::to_string(distances.size()) + " entries for " +
         std::to_string(users) + " users");
  for (std::size_t m = 0; m < users; ++m)
    if (!(distance(m) >= reference_distance)) fail("distance below reference_distance");
}

double ChannelConfig::distance(UserIndex m) const {
  if (distances.empty()) return 30.0 + 2.0 * static_cast<double>(m);
  return distances.at(m);
}

std::vector<double> ChannelConfig::deadlines(std::size_t users) const {
  std::vector<double> d(users);
  for (std::size_t m = 0; m < users; ++m) d[m] = D1 + Delta * static_cast<double>(m);
  return d;
}

double ChannelConfig::mean_gain(UserIndex m) const {
  return db_to_linear(reference_snr_db) *
         std::pow(distance(m) / reference_distance, -pathloss_exponent) /
         db_to_linear(noise_power_db);
}

void to_json(nlohmann::json& j, const ChannelConfig& c) {
  j = nlohmann::json{{"reference_snr_db", c.reference_snr_db},
                     {"reference_distance", c.reference_distance},
                     {"pathloss_exponent", c.pathloss_exponent},
                     {"noise_power_db", c.noise_power_db},
                     {"distances", c.distances},
                     {"D1", c.D1},
                     {"Delta", c.Delta},
                     {"E_th", c.E_th},
                     {"P_t_db", c.P_t_db},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, ChannelConfig& c) {
  static const char* const known[] = {"reference_snr_db", "reference_distance", "pathloss_exponent",
                                      "noise_power_db",   "distances",          "D1",
                                      "Delta",            "E_th",               "P_t_db",
                                      "seed"};
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw std::invalid_argument("channel config: unknown field '" + item.key() + "'");
  }
  ChannelConfig d;
  c.reference_snr_db = j.value("reference_snr_db", d.reference_snr_db);
  c.reference_distance = j.value("reference_distance", d.reference_distance);
  c.pathloss_exponent = j.value("pathloss_exponent", d.pathloss_exponent);
  c.noise_power_db = j.value("noise_power_db", d.noise_power_db);
  c.distances = j.value("distances", d.distances);
  c.D1 = j.value("D1", d.D1);
  c.Delta = j.value("Delta", d.Delta);
  c.E_th = j.value("E_th", d.E_th);
  c.P_t_db = j.value("P_t_db", d.P_t_db);
  c.seed = j.value("seed", d.seed);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
  return Rng(splitmix64(splitmix64(seed) ^ stream));
}

double exponential_from_uniform(double u) { return -std::log1p(-u); }

double exponential_unit_mean(Rng& rng) {
  // 53 random bits, so u < 1 exactly.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return exponential_from_uniform(u);
}

Scenario draw_scenario(const ChannelConfig& config, std::size_t users, Rng& rng) {
  config.validate(users);
  std::vector<double> gains(users);
  for (std::size_t m = 0; m < users; ++m) gains[m] = config.mean_gain(m) * exponential_unit_mean(rng);
  return Scenario(std::move(gains), config.deadlines(users), config.E_th, db_to_linear(config.P_t_db));
}

Scenario draw_scenario(const ChannelConfig& config, std::size_t users, std::uint64_t stream) {
  Rng rng = make_rng(config.seed, stream);
  return draw_scenario(config, users, rng);
}

}  // namespace nomamec
