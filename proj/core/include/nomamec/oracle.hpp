#pragma once

#include "nomamec/model.hpp"

namespace nomamec {

/// Brute-force grid search for tiny instances. Each refinement round
/// re-grids [x - step, x + step] around the incumbent with step / 10.
struct GridSpec {
  /// watts
  double power_step = 0.02;
  /// seconds
  double time_step = 0.01;
  int refinement_rounds = 2;

  void validate() const;
};

/// grid_error sums, over the gridded coordinates, the final step times the
/// largest difference quotient seen along that coordinate in the last round.
template <typename Allocation>
struct OracleResult {
  double objective = 0.0;
  Allocation allocation;
  double grid_error = 0.0;
  long long evaluations = 0;
};

using NomaOracleResult = OracleResult<NomaAllocation>;
using OmaOracleResult = OracleResult<OmaAllocation>;

inline constexpr std::size_t kOracleMaxNomaUsers = 3;
inline constexpr std::size_t kOracleMaxOmaUsers = 4;

/// Grids every power and slot length except the last user's power in its
/// last slot, which is set to the largest feasible value (the objective is
/// nondecreasing in it). Only feasible points are evaluated; the incumbent
/// passes audit_noma at tolerance 0. Throws std::invalid_argument for more
/// than kOracleMaxNomaUsers users.
NomaOracleResult brute_force_noma(const Scenario& scenario, const GridSpec& grid = {});

/// Same scheme over (P_m, D_m), the last user's power set exactly.
OmaOracleResult brute_force_oma(const Scenario& scenario, const GridSpec& grid = {});

}  // namespace nomamec
