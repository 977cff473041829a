#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nomamec/channel.hpp"
#include "nomamec/conic.hpp"
#include "nomamec/sca.hpp"

namespace nomamec {

enum class ExperimentKind { kConvergence, kVsEnergy, kVsUsers, kVsDelta, kSingle };
enum class Scheme { kNoma, kOma, kBoth };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(Scheme scheme);
/// Throws std::invalid_argument.
ExperimentKind parse_kind(std::string_view text);
Scheme parse_scheme(std::string_view text);

/// Per-config overrides of the channel defaults.
struct SweepConfig {
  std::optional<double> E_th;
  std::optional<double> P_t_db;
  std::optional<double> D1;
};

/// The swept value is E_th (vs_energy), the user count (vs_users) or Delta
/// (vs_delta); convergence and single runs have no sweep. Every config is
/// run at every sweep value. Trial t of every point draws its gains from
/// stream t, so points share channel realizations.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kSingle;
  std::vector<double> sweep;
  std::vector<SweepConfig> configs;
  std::size_t users = 4;
  int trials = 20;
  ChannelConfig channel;
  ScaSettings sca;
  BackendSettings backend_settings;
  Scheme scheme = Scheme::kBoth;
  std::string backend{kDefaultBackend};
  /// Empty means standard output.
  std::string output;
  int jobs = 1;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Throws InputError.
ExperimentSpec spec_from_json(const nlohmann::json& j);
nlohmann::json spec_to_json(const ExperimentSpec& spec);

struct PointResult {
  std::size_t config = 0;
  /// NaN without a sweep.
  double sweep_value = 0.0;
  std::size_t users = 0;
  double E_th = 0.0;
  double P_t_db = 0.0;
  double D1 = 0.0;
  double Delta = 0.0;
  Scheme scheme = Scheme::kNoma;
  /// Per trial in trial order; NaN where the solve failed.
  std::vector<double> objective_bits;
  std::vector<int> iterations;
  std::vector<Termination> termination;
  /// Mean trajectory over the successful trials, shorter runs padded with
  /// their final value. bits.
  std::vector<double> mean_trajectory_bits;
  double mean_bits = 0.0;
  double stderr_bits = 0.0;
  int succeeded = 0;
  int failed = 0;
};

struct ExperimentResult {
  ExperimentSpec spec;
  /// Sorted by config, then sweep value, then scheme (NOMA first).
  std::vector<PointResult> points;
  int failures = 0;

  /// nullptr when absent.
  const PointResult* find(std::size_t config, double sweep_value, Scheme scheme) const;
};

/// Runs every (point, trial) pair on up to spec.jobs threads. Failed
/// solves are reported on `log` and excluded from the means.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log = nullptr);

/// Metadata rows start with '#'. Throws std::runtime_error on write errors.
void write_csv(const ExperimentResult& result, std::ostream& out);

std::string build_identifier();

/// Solves one scenario, printing the schedule, offloaded bits and slacks to
/// `out` and the allocation JSON after them. Returns 0 when every requested
/// solve succeeded and passed audit, 1 otherwise.
int run_single(const Scenario& scenario, Scheme scheme, const ScaSettings& settings,
               SolverBackend& backend, std::ostream& out);

}  // namespace nomamec
