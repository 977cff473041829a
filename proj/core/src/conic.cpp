#include "nomamec/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "nomamec/interior_point.hpp"

namespace nomamec {

VariableIndex ConicProblem::add_variable(std::string name, double lower_bound) {
  names_.push_back(std::move(name));
  lower_bounds_.push_back(lower_bound);
  objective_.push_back(0.0);
  return static_cast<VariableIndex>(names_.size() - 1);
}

void ConicProblem::set_objective(VariableIndex v, double coefficient) {
  objective_.at(v) = coefficient;
}

void ConicProblem::add_row(LinearRow row) { rows_.push_back(std::move(row)); }

void ConicProblem::add_cone(Cone cone) { cones_.push_back(std::move(cone)); }

std::size_t ConicProblem::cone_count(ConeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(cones_.begin(), cones_.end(), [kind](const Cone& c) { return c.kind == kind; }));
}

void ConicProblem::validate() const {
  const int n = variable_count();
  auto in_range = [n](VariableIndex v) { return v >= 0 && v < n; };
  for (const auto& row : rows_)
    for (const auto& t : row.terms)
      if (!in_range(t.variable)) throw std::invalid_argument("row '" + row.label + "' has bad index");
  std::vector<int> owner(n, -1);
  for (std::size_t k = 0; k < cones_.size(); ++k) {
    const Cone& cone = cones_[k];
    const std::size_t min_size = cone.kind == ConeKind::kSecondOrder ? 1 : 2;
    if (cone.members.size() < min_size)
      throw std::invalid_argument("cone '" + cone.label + "' is too short");
    for (VariableIndex v : cone.members) {
      if (!in_range(v)) throw std::invalid_argument("cone '" + cone.label + "' has bad index");
      if (owner[v] >= 0)
        throw std::invalid_argument("variable '" + names_[v] + "' belongs to two cones");
      owner[v] = static_cast<int>(k);
    }
  }
}

double ConicProblem::evaluate_objective(const std::vector<double>& x) const {
  double value = 0.0;
  for (std::size_t i = 0; i < objective_.size(); ++i) value += objective_[i] * x.at(i);
  return value;
}

double ConicProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < lower_bounds_.size(); ++i)
    worst = std::max(worst, lower_bounds_[i] - x.at(i));
  for (const auto& row : rows_) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coefficient * x.at(t.variable);
    const double excess = lhs - row.rhs;
    worst = std::max(worst, row.sense == RowSense::kEqual ? std::abs(excess) : excess);
  }
  for (const auto& cone : cones_) {
    double tail = 0.0;
    const std::size_t head = cone.kind == ConeKind::kSecondOrder ? 1 : 2;
    for (std::size_t k = head; k < cone.members.size(); ++k)
      tail += x.at(cone.members[k]) * x.at(cone.members[k]);
    if (cone.kind == ConeKind::kSecondOrder) {
      worst = std::max(worst, std::sqrt(tail) - x.at(cone.members[0]));
    } else {
      const double a = x.at(cone.members[0]);
      const double b = x.at(cone.members[1]);
      // Same as the standard-cone image ((a+b)/sqrt2, (a-b)/sqrt2, tail).
      const double radius = std::sqrt(0.5 * (a - b) * (a - b) + tail);
      worst = std::max({worst, radius - (a + b) / std::sqrt(2.0), -a, -b});
    }
  }
  return worst;
}

void ConicProblem::dump(std::ostream& out) const {
  out << "maximize\n ";
  bool any = false;
  for (std::size_t i = 0; i < objective_.size(); ++i) {
    if (objective_[i] == 0.0) continue;
    out << ' ' << (objective_[i] < 0 ? "- " : (any ? "+ " : "")) << std::abs(objective_[i]) << ' '
        << names_[i];
    any = true;
  }
  if (!any) out << " 0";
  out << "\nsubject to\n";
  for (const auto& row : rows_) {
    out << "  " << (row.label.empty() ? "row" : row.label) << ":";
    for (const auto& t : row.terms)
      out << ' ' << (t.coefficient < 0 ? "- " : "+ ") << std::abs(t.coefficient) << ' '
          << names_[t.variable];
    out << (row.sense == RowSense::kEqual ? " = " : " <= ") << row.rhs << '\n';
  }
  out << "cones\n";
  for (const auto& cone : cones_) {
    out << "  " << (cone.label.empty() ? "cone" : cone.label)
        << (cone.kind == ConeKind::kSecondOrder ? " soc (" : " rsoc (");
    for (std::size_t k = 0; k < cone.members.size(); ++k)
      out << (k ? ", " : "") << names_[cone.members[k]];
    out << ")\n";
  }
  out << "bounds\n";
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (std::isinf(lower_bounds_[i])) continue;
    out << "  " << names_[i] << " >= " << lower_bounds_[i] << '\n';
  }
  out << "variables " << names_.size() << ", rows " << rows_.size() << ", cones " << cones_.size()
      << '\n';
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
    case SolveStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

std::vector<std::string> available_backends() { return {std::string(kDefaultBackend)}; }

std::unique_ptr<SolverBackend> make_backend(std::string_view name, const BackendSettings& settings) {
  if (name == kDefaultBackend) return std::make_unique<InteriorPointBackend>(settings);
  throw std::invalid_argument("unknown solver backend '" + std::string(name) + "'");
}

}  // namespace nomamec
