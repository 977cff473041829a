#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace nomamec {

/// Users and slots are indexed from 0. User m transmits in slots 0..m; the
/// first slot is the fixed interval [0, D_0] shared by every user.
using UserIndex = std::size_t;
using SlotIndex = std::size_t;

inline constexpr double kDefaultFeasibilityTolerance = 1e-6;

/// Offloaded data is computed in nats; reports convert at the boundary.
double nats_to_bits(double nats);

/// Dense storage for an M x M lower-triangular array (entries with j <= m).
template <typename T>
class TriangularMatrix {
 public:
  TriangularMatrix() = default;
  explicit TriangularMatrix(std::size_t order, T fill = T{})
      : order_(order), data_(order * (order + 1) / 2, fill) {}

  std::size_t order() const { return order_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t m, std::size_t j) { return data_[offset(m, j)]; }
  const T& operator()(std::size_t m, std::size_t j) const { return data_[offset(m, j)]; }

  T& at(std::size_t m, std::size_t j) {
    check(m, j);
    return data_[offset(m, j)];
  }
  const T& at(std::size_t m, std::size_t j) const {
    check(m, j);
    return data_[offset(m, j)];
  }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool operator==(const TriangularMatrix&) const = default;

 private:
  static std::size_t offset(std::size_t m, std::size_t j) { return m * (m + 1) / 2 + j; }
  void check(std::size_t m, std::size_t j) const {
    if (m >= order_ || j > m) throw std::out_of_range("triangular index out of range");
  }

  std::size_t order_ = 0;
  std::vector<T> data_;
};

/// Immutable problem instance. Gains are normalized by the receiver noise
/// power, deadlines are sorted nondecreasing.
class Scenario {
 public:
  Scenario(std::vector<double> gains, std::vector<double> deadlines, double energy_budget,
           double power_budget);

  std::size_t user_count() const { return gains_.size(); }
  double gain(UserIndex m) const { return gains_.at(m); }
  double deadline(UserIndex m) const { return deadlines_.at(m); }
  std::span<const double> gains() const { return gains_; }
  std::span<const double> deadlines() const { return deadlines_; }
  double energy_budget() const { return energy_budget_; }
  double power_budget() const { return power_budget_; }

 private:
  std::vector<double> gains_;
  std::vector<double> deadlines_;
  double energy_budget_;
  double power_budget_;
};

/// NOMA schedule: P(m, j) is user m's power during slot j (j <= m) and
/// extension(j) the length of slot j. Slot 0 always has length D_0.
class NomaAllocation {
 public:
  NomaAllocation(const Scenario& scenario, TriangularMatrix<double> powers,
                 std::vector<double> extensions);

  static NomaAllocation zero(const Scenario& scenario);

  std::size_t user_count() const { return extensions_.size(); }
  double power(UserIndex m, SlotIndex j) const { return powers_.at(m, j); }
  double extension(SlotIndex j) const { return extensions_.at(j); }
  const TriangularMatrix<double>& powers() const { return powers_; }
  std::span<const double> extensions() const { return extensions_; }

 private:
  TriangularMatrix<double> powers_;
  std::vector<double> extensions_;
};

/// OMA schedule: user m transmits only in its own slot of length slot(m).
class OmaAllocation {
 public:
  OmaAllocation(std::vector<double> powers, std::vector<double> slots);

  static OmaAllocation zero(std::size_t users);

  std::size_t user_count() const { return powers_.size(); }
  double power(UserIndex m) const { return powers_.at(m); }
  double slot(UserIndex m) const { return slots_.at(m); }
  std::span<const double> powers() const { return powers_; }
  std::span<const double> slots() const { return slots_; }

 private:
  std::vector<double> powers_;
  std::vector<double> slots_;
};

/// Constraint slacks of a schedule. Negative slack means violation.
struct FeasibilityReport {
  double energy_slack = 0.0;
  std::vector<double> deadline_slack;
  std::vector<double> power_slack;
  double tolerance = kDefaultFeasibilityTolerance;
  bool feasible = true;

  double worst_slack() const;
};

/// 1 + sum_{i=j}^{m-1} g_i P(i, j): noise plus the signals of lower-indexed
/// users that are still undecoded when user m is decoded in slot j.
double interference(const NomaAllocation& alloc, const Scenario& scenario, UserIndex m, SlotIndex j);

double offloaded_nats(const NomaAllocation& alloc, const Scenario& scenario, UserIndex m);
double offloaded_nats_oma(const OmaAllocation& alloc, const Scenario& scenario, UserIndex m);

/// min_m of the offloaded data, the max-min objective.
double min_offloaded_nats(const NomaAllocation& alloc, const Scenario& scenario);
double min_offloaded_nats_oma(const OmaAllocation& alloc, const Scenario& scenario);

FeasibilityReport audit_noma(const NomaAllocation& alloc, const Scenario& scenario,
                             double tolerance = kDefaultFeasibilityTolerance);
FeasibilityReport audit_oma(const OmaAllocation& alloc, const Scenario& scenario,
                            double tolerance = kDefaultFeasibilityTolerance);

}  // namespace nomamec
