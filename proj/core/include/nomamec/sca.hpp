#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nomamec/bounds.hpp"
#include "nomamec/conic.hpp"
#include "nomamec/model.hpp"

namespace nomamec {

/// Iteration-0 point. Both use zero powers. kDeadlineGaps sets every slot to
/// its full deadline gap D_j - D_{j-1}; kZero sets the optimized slots to 0.
enum class StartPoint { kDeadlineGaps, kZero };

struct ScaSettings {
  int max_iterations = 500;
  double rel_tolerance = 1e-5;
  /// nats
  double abs_tolerance = 1e-7;
  std::optional<double> proximal_weight;
  FixedSlotBound fixed_slot = FixedSlotBound::kLogRatio;
  StartPoint start = StartPoint::kDeadlineGaps;
  /// Keep every iterate's allocation in the report.
  bool keep_history = true;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class Termination { kConverged, kIterationLimit, kSolverFailure };

std::string_view to_string(Termination termination);

template <typename Allocation>
struct SolveReport {
  /// trajectory[0] is the exact objective of the start point (0, since
  /// start powers are 0); trajectory[n]
  /// the optimal value of the n-th convex subproblem. nats.
  std::vector<double> trajectory;
  Allocation allocation;
  std::vector<Allocation> history;
  std::vector<double> iteration_seconds;
  int iterations = 0;
  Termination termination = Termination::kIterationLimit;
  std::string failure;

  double objective() const { return trajectory.back(); }
};

using NomaReport = SolveReport<NomaAllocation>;
using OmaReport = SolveReport<OmaAllocation>;

NomaAllocation start_point(const Scenario& scenario, StartPoint start);
OmaAllocation start_point_oma(const Scenario& scenario, StartPoint start);

/// Successive convex approximation for the max-min NOMA problem. If a subproblem fails, the last
/// feasible iterate is returned with Termination::kSolverFailure.
NomaReport solve_noma(const Scenario& scenario, const ScaSettings& settings, SolverBackend& backend);
NomaReport solve_noma(const Scenario& scenario, const ScaSettings& settings = {});

OmaReport solve_oma(const Scenario& scenario, const ScaSettings& settings, SolverBackend& backend);
OmaReport solve_oma(const Scenario& scenario, const ScaSettings& settings = {});

}  // namespace nomamec
