#pragma once

#include "nomamec/conic.hpp"

namespace nomamec {

/// Primal-dual interior-point method for problems over the nonnegative
/// orthant and second-order cones.
///
/// The problem is brought to the form
///
///     minimize c'x  subject to  Ax = b,  Gx + s = h,  s in K
///
/// where rotated cones are mapped onto standard ones through
/// ((x1 + x2)/sqrt2, (x1 - x2)/sqrt2, x3, ...). Each iteration takes a
/// Mehrotra predictor-corrector step with Nesterov-Todd scaling; the
/// quasidefinite KKT system is factored with a sparse LDL' after static
/// regularization and cleaned up by iterative refinement. The start point
/// need not be feasible. Infeasibility is not certified: a problem without
/// a solution ends in kIterationLimit or kNumericalFailure.
class InteriorPointBackend final : public SolverBackend {
 public:
  explicit InteriorPointBackend(BackendSettings settings = {}) : settings_(settings) {}

  std::string_view name() const override { return "ipm"; }
  bool supports_rotated_cones() const override { return true; }
  const BackendSettings& settings() const override { return settings_; }
  ConicSolution solve(const ConicProblem& problem) override;

 private:
  BackendSettings settings_;
};

}  // namespace nomamec
