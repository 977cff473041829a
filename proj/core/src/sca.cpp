#include "nomamec/sca.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "nomamec/subproblem.hpp"

namespace nomamec {

void ScaSettings::validate() const {
  if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
  if (!(rel_tolerance > 0.0) || !(abs_tolerance > 0.0))
    throw std::invalid_argument("SCA tolerances must be positive");
  if (proximal_weight && !(*proximal_weight >= 0.0))
    throw std::invalid_argument("proximal weight must be nonnegative");
}

std::string_view to_string(Termination termination) {
  switch (termination) {
    case Termination::kConverged: return "converged";
    case Termination::kIterationLimit: return "iteration_limit";
    case Termination::kSolverFailure: return "solver_failure";
  }
  return "unknown";
}

namespace {

using Clock = std::chrono::steady_clock;

bool settled(double previous, double current, const ScaSettings& settings) {
  return std::abs(current - previous) <= settings.abs_tolerance + settings.rel_tolerance * std::abs(previous);
}

/// Shared outer loop. `step` solves one subproblem around the current
/// iterate and returns (allocation, objective).
template <typename Allocation, typename Step>
SolveReport<Allocation> iterate(Allocation start, double start_value, const ScaSettings& settings,
                                Step step) {
  settings.validate();
  SolveReport<Allocation> report{{start_value}, std::move(start), {}, {}, 0,
                                 Termination::kIterationLimit, {}};
  for (int n = 1; n <= settings.max_iterations; ++n) {
    const auto begin = Clock::now();
    try {
      auto [next, value] = step(report.allocation);
      report.allocation = std::move(next);
      report.trajectory.push_back(value);
    } catch (const SolverFailure& failure) {
      report.termination = Termination::kSolverFailure;
      report.failure = failure.what();
      return report;
    }
    report.iteration_seconds.push_back(std::chrono::duration<double>(Clock::now() - begin).count());
    report.iterations = n;
    if (settings.keep_history) report.history.push_back(report.allocation);
    // The start value is exact, not a subproblem optimum; compare only
    // consecutive subproblem values.
    if (n >= 2 && settled(report.trajectory[n - 1], report.trajectory[n], settings)) {
      report.termination = Termination::kConverged;
      return report;
    }
  }
  return report;
}

SubproblemOptions options_for(const ScaSettings& settings) {
  return {settings.fixed_slot, settings.proximal_weight};
}

std::vector<double> deadline_gaps(const Scenario& scenario) {
  std::vector<double> gaps(scenario.user_count());
  double previous = 0.0;
  for (std::size_t m = 0; m < gaps.size(); ++m) {
    gaps[m] = scenario.deadline(m) - previous;
    previous = scenario.deadline(m);
  }
  return gaps;
}

}  // namespace

NomaAllocation start_point(const Scenario& scenario, StartPoint start) {
  if (start == StartPoint::kZero) return NomaAllocation::zero(scenario);
  std::vector<double> ext = deadline_gaps(scenario);
  ext[0] = scenario.deadline(0);
  return {scenario, TriangularMatrix<double>(scenario.user_count()), std::move(ext)};
}

OmaAllocation start_point_oma(const Scenario& scenario, StartPoint start) {
  if (start == StartPoint::kZero) return OmaAllocation::zero(scenario.user_count());
  return {std::vector<double>(scenario.user_count(), 0.0), deadline_gaps(scenario)};
}

NomaReport solve_noma(const Scenario& scenario, const ScaSettings& settings, SolverBackend& backend) {
  const SubproblemOptions options = options_for(settings);
  NomaAllocation start = start_point(scenario, settings.start);
  const double start_value = min_offloaded_nats(start, scenario);
  return iterate(std::move(start), start_value, settings, [&](const NomaAllocation& current) {
    const NomaSubproblem sub = build_noma_subproblem(scenario, ExpansionPoint::from(current), options);
    const NomaExtract out = extract(backend.solve(sub.problem), sub.map, scenario);
    return std::pair{out.allocation, out.objective};
  });
}

NomaReport solve_noma(const Scenario& scenario, const ScaSettings& settings) {
  auto backend = make_backend();
  return solve_noma(scenario, settings, *backend);
}

OmaReport solve_oma(const Scenario& scenario, const ScaSettings& settings, SolverBackend& backend) {
  const SubproblemOptions options = options_for(settings);
  OmaAllocation start = start_point_oma(scenario, settings.start);
  const double start_value = min_offloaded_nats_oma(start, scenario);
  return iterate(std::move(start), start_value, settings, [&](const OmaAllocation& current) {
    const OmaSubproblem sub = build_oma_subproblem(scenario, current, options);
    const OmaExtract out = extract(backend.solve(sub.problem), sub.map);
    return std::pair{out.allocation, out.objective};
  });
}

OmaReport solve_oma(const Scenario& scenario, const ScaSettings& settings) {
  auto backend = make_backend();
  return solve_oma(scenario, settings, *backend);
}

}  // namespace nomamec
