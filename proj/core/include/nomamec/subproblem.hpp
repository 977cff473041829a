#pragma once

#include <optional>
#include <vector>

#include "nomamec/bounds.hpp"
#include "nomamec/conic.hpp"
#include "nomamec/model.hpp"

namespace nomamec {

struct SubproblemOptions {
  FixedSlotBound fixed_slot = FixedSlotBound::kLogRatio;
  /// When set, the objective becomes ell - weight * ||x - x0||^2 over the
  /// power and slot variables.
  std::optional<double> proximal_weight;
};

/// Where the decision variables live in the primal vector.
struct NomaIndexMap {
  TriangularMatrix<VariableIndex> powers;
  /// extensions[0] is -1: slot 0 is not a variable.
  std::vector<VariableIndex> extensions;
  VariableIndex objective = -1;
};

struct OmaIndexMap {
  std::vector<VariableIndex> powers;
  std::vector<VariableIndex> slots;
  VariableIndex objective = -1;
};

struct NomaSubproblem {
  ConicProblem problem;
  NomaIndexMap map;
};

struct OmaSubproblem {
  ConicProblem problem;
  OmaIndexMap map;
};

/// Convex restriction of the max-min NOMA problem around `point`: maximize
/// ell subject to the surrogate rate constraints, the majorized energy
/// budget, the deadlines and the per-slot power caps.
NomaSubproblem build_noma_subproblem(const Scenario& scenario, const ExpansionPoint& point,
                                     const SubproblemOptions& options = {});

/// OMA counterpart; `point` holds the previous powers and slot lengths.
OmaSubproblem build_oma_subproblem(const Scenario& scenario, const OmaAllocation& point,
                                   const SubproblemOptions& options = {});

/// Number of auxiliary variables build_noma_subproblem adds for M users.
int noma_auxiliary_count(std::size_t users, const SubproblemOptions& options = {});

/// Decision-variable values with magnitude below this are solver noise and
/// read as 0.
inline constexpr double kClampThreshold = 1e-9;

struct NomaExtract {
  NomaAllocation allocation;
  double objective;
};

struct OmaExtract {
  OmaAllocation allocation;
  double objective;
};

/// Throws SolverFailure when the solution is not optimal or a decision
/// variable is more negative than kClampThreshold.
NomaExtract extract(const ConicSolution& solution, const NomaIndexMap& map,
                    const Scenario& scenario);
OmaExtract extract(const ConicSolution& solution, const OmaIndexMap& map);

}  // namespace nomamec
