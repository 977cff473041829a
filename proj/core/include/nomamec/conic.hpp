#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nomamec {

using VariableIndex = int;

struct LinearTerm {
  VariableIndex variable;
  double coefficient;
};

enum class RowSense { kLessEqual, kEqual };

/// sum(terms) <= rhs, or == rhs.
struct LinearRow {
  std::vector<LinearTerm> terms;
  RowSense sense = RowSense::kLessEqual;
  double rhs = 0.0;
  std::string label;
};

enum class ConeKind {
  /// ||(x_2, ..., x_k)|| <= x_1
  kSecondOrder,
  /// 2 x_1 x_2 >= ||(x_3, ..., x_k)||^2 with x_1, x_2 >= 0
  kRotatedSecondOrder,
};

struct Cone {
  ConeKind kind = ConeKind::kSecondOrder;
  std::vector<VariableIndex> members;
  std::string label;
};

/// Solver-agnostic SOCP: maximize c'x over linear rows, cone memberships
/// and per-variable lower bounds.
class ConicProblem {
 public:
  static constexpr double kFree = -std::numeric_limits<double>::infinity();

  VariableIndex add_variable(std::string name, double lower_bound = kFree);
  void set_objective(VariableIndex v, double coefficient);
  void add_row(LinearRow row);
  void add_cone(Cone cone);

  int variable_count() const { return static_cast<int>(names_.size()); }
  const std::string& name(VariableIndex v) const { return names_.at(v); }
  double lower_bound(VariableIndex v) const { return lower_bounds_.at(v); }
  const std::vector<double>& objective() const { return objective_; }
  const std::vector<LinearRow>& rows() const { return rows_; }
  const std::vector<Cone>& cones() const { return cones_; }

  std::size_t cone_count(ConeKind kind) const;

  /// Throws std::invalid_argument when an index is out of range, a cone is
  /// too short, or a variable sits in more than one cone.
  void validate() const;

  /// Value of the objective at x.
  double evaluate_objective(const std::vector<double>& x) const;

  /// Largest violation of rows, bounds and cones at x (0 when feasible).
  double max_violation(const std::vector<double>& x) const;

  /// Plain-text standard-form listing: variables, objective, rows, cones.
  void dump(std::ostream& out) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> lower_bounds_;
  std::vector<double> objective_;
  std::vector<LinearRow> rows_;
  std::vector<Cone> cones_;
};

enum class SolveStatus { kOptimal, kInfeasible, kNumericalFailure, kIterationLimit };

std::string_view to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  /// Empty unless status is kOptimal.
  std::vector<double> primal;
  double objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  int iterations = 0;
};

struct BackendSettings {
  double feasibility_tolerance = 1e-8;
  double absolute_gap_tolerance = 1e-8;
  double relative_gap_tolerance = 1e-8;
  int max_iterations = 100;
  /// Print one line per interior-point iteration to stderr.
  bool verbose = false;
};

/// A conic solver. Instances are not shared between threads; distinct
/// instances may solve distinct problems concurrently.
class SolverBackend {
 public:
  virtual ~SolverBackend() = default;

  virtual std::string_view name() const = 0;
  virtual bool supports_rotated_cones() const = 0;
  virtual const BackendSettings& settings() const = 0;
  virtual ConicSolution solve(const ConicProblem& problem) = 0;
};

/// Raised when a backend returns anything other than an optimal solution,
/// or the solution is unusable.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

inline constexpr std::string_view kDefaultBackend = "ipm";
inline constexpr const char* kBackendEnvironmentVariable = "NOMAMEC_BACKEND";

std::vector<std::string> available_backends();

/// Throws std::invalid_argument for unknown names.
std::unique_ptr<SolverBackend> make_backend(std::string_view name = kDefaultBackend,
                                            const BackendSettings& settings = {});

}  // namespace nomamec
