#include "nomamec/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nomamec {

namespace {

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

bool all_nonnegative(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v) && v >= 0.0; });
}

void check_user(std::size_t m, std::size_t users) {
  if (m >= users) throw std::out_of_range("user index " + std::to_string(m) + " out of range");
}

}  // namespace

double nats_to_bits(double nats) { return nats / std::numbers::ln2; }

Scenario::Scenario(std::vector<double> gains, std::vector<double> deadlines, double energy_budget,
                   double power_budget)
    : gains_(std::move(gains)),
      deadlines_(std::move(deadlines)),
      energy_budget_(energy_budget),
      power_budget_(power_budget) {
  require(!gains_.empty(), "scenario needs at least one user");
  require(deadlines_.size() == gains_.size(), "one deadline per user is required");
  require(all_nonnegative(gains_), "channel gains must be finite and nonnegative");
  for (double d : deadlines_) require(std::isfinite(d) && d > 0.0, "deadlines must be positive");
  require(std::is_sorted(deadlines_.begin(), deadlines_.end()), "deadlines must be nondecreasing");
  // A zero energy budget is admitted: it is the degenerate all-silent case.
  require(std::isfinite(energy_budget_) && energy_budget_ >= 0.0,
          "energy budget must be nonnegative");
  require(std::isfinite(power_budget_) && power_budget_ > 0.0, "power budget must be positive");
}

NomaAllocation::NomaAllocation(const Scenario& scenario, TriangularMatrix<double> powers,
                               std::vector<double> extensions)
    : powers_(std::move(powers)), extensions_(std::move(extensions)) {
  const std::size_t users = scenario.user_count();
  require(powers_.order() == users, "power matrix order must equal the user count");
  require(extensions_.size() == users, "one slot extension per user is required");
  require(all_nonnegative(powers_.values()), "powers must be finite and nonnegative");
  require(all_nonnegative(extensions_), "slot extensions must be finite and nonnegative");
  require(extensions_[0] == scenario.deadline(0), "the first slot must equal the first deadline");
}

NomaAllocation NomaAllocation::zero(const Scenario& scenario) {
  std::vector<double> ext(scenario.user_count(), 0.0);
  ext[0] = scenario.deadline(0);
  return {scenario, TriangularMatrix<double>(scenario.user_count()), std::move(ext)};
}

OmaAllocation::OmaAllocation(std::vector<double> powers, std::vector<double> slots)
    : powers_(std::move(powers)), slots_(std::move(slots)) {
  require(!powers_.empty(), "allocation needs at least one user");
  require(powers_.size() == slots_.size(), "powers and slots must have equal length");
  require(all_nonnegative(powers_), "powers must be finite and nonnegative");
  require(all_nonnegative(slots_), "slots must be finite and nonnegative");
}

OmaAllocation OmaAllocation::zero(std::size_t users) {
  return {std::vector<double>(users, 0.0), std::vector<double>(users, 0.0)};
}

double FeasibilityReport::worst_slack() const {
  double worst = energy_slack;
  for (double s : deadline_slack) worst = std::min(worst, s);
  for (double s : power_slack) worst = std::min(worst, s);
  return worst;
}

double interference(const NomaAllocation& alloc, const Scenario& scenario, UserIndex m,
                    SlotIndex j) {
  check_user(m, scenario.user_count());
  if (j > m) throw std::out_of_range("slot index exceeds user index");
  if (alloc.user_count() != scenario.user_count())
    throw std::invalid_argument("allocation does not match scenario");
  double total = 1.0;
  for (std::size_t i = j; i < m; ++i) total += scenario.gain(i) * alloc.power(i, j);
  return total;
}

double offloaded_nats(const NomaAllocation& alloc, const Scenario& scenario, UserIndex m) {
  check_user(m, scenario.user_count());
  double total = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double sinr = scenario.gain(m) * alloc.power(m, j) / interference(alloc, scenario, m, j);
    total += alloc.extension(j) * std::log1p(sinr);
  }
  return total;
}

double offloaded_nats_oma(const OmaAllocation& alloc, const Scenario& scenario, UserIndex m) {
  check_user(m, scenario.user_count());
  check_user(m, alloc.user_count());
  return alloc.slot(m) * std::log1p(scenario.gain(m) * alloc.power(m));
}

double min_offloaded_nats(const NomaAllocation& alloc, const Scenario& scenario) {
  double best = offloaded_nats(alloc, scenario, 0);
  for (std::size_t m = 1; m < scenario.user_count(); ++m)
    best = std::min(best, offloaded_nats(alloc, scenario, m));
  return best;
}

double min_offloaded_nats_oma(const OmaAllocation& alloc, const Scenario& scenario) {
  double best = offloaded_nats_oma(alloc, scenario, 0);
  for (std::size_t m = 1; m < scenario.user_count(); ++m)
    best = std::min(best, offloaded_nats_oma(alloc, scenario, m));
  return best;
}

namespace {

void finish(FeasibilityReport& report, double tolerance) {
  report.tolerance = tolerance;
  report.feasible = report.worst_slack() >= -tolerance;
}

}  // namespace

FeasibilityReport audit_noma(const NomaAllocation& alloc, const Scenario& scenario,
                             double tolerance) {
  const std::size_t users = scenario.user_count();
  if (alloc.user_count() != users) throw std::invalid_argument("allocation does not match scenario");

  FeasibilityReport report;
  double energy = 0.0;
  for (std::size_t m = 0; m < users; ++m)
    for (std::size_t j = 0; j <= m; ++j) energy += alloc.extension(j) * alloc.power(m, j);
  report.energy_slack = scenario.energy_budget() - energy;

  report.deadline_slack.assign(users, 0.0);
  double elapsed = alloc.extension(0);
  for (std::size_t m = 1; m < users; ++m) {
    elapsed += alloc.extension(m);
    report.deadline_slack[m] = scenario.deadline(m) - elapsed;
  }

  report.power_slack.assign(users, 0.0);
  for (std::size_t j = 0; j < users; ++j) {
    double sum = 0.0;
    for (std::size_t m = j; m < users; ++m) sum += alloc.power(m, j);
    report.power_slack[j] = scenario.power_budget() - sum;
  }
  finish(report, tolerance);
  return report;
}

FeasibilityReport audit_oma(const OmaAllocation& alloc, const Scenario& scenario,
                            double tolerance) {
  const std::size_t users = scenario.user_count();
  if (alloc.user_count() != users) throw std::invalid_argument("allocation does not match scenario");

  FeasibilityReport report;
  double energy = 0.0;
  for (std::size_t m = 0; m < users; ++m) energy += alloc.slot(m) * alloc.power(m);
  report.energy_slack = scenario.energy_budget() - energy;

  report.deadline_slack.resize(users);
  report.power_slack.resize(users);
  double elapsed = 0.0;
  for (std::size_t m = 0; m < users; ++m) {
    elapsed += alloc.slot(m);
    report.deadline_slack[m] = scenario.deadline(m) - elapsed;
    report.power_slack[m] = scenario.power_budget() - alloc.power(m);
  }
  finish(report, tolerance);
  return report;
}

}  // namespace nomamec
