#pragma once

#include <vector>

#include "nomamec/model.hpp"

namespace nomamec {

/// Point around which the nonconvex rate and energy terms are linearized.
/// Same layout as a NomaAllocation; extension(0) is held at D_0.
struct ExpansionPoint {
  TriangularMatrix<double> powers;
  std::vector<double> extensions;

  /// Zero powers and extensions, with the fixed first slot at D_0.
  static ExpansionPoint initial(const Scenario& scenario);
  static ExpansionPoint from(const NomaAllocation& alloc);

  /// Throws std::invalid_argument on shape mismatch or negative entries.
  void validate(const Scenario& scenario) const;
  double interference(const Scenario& scenario, UserIndex m, SlotIndex j) const;
};

/// f = a + b*D - c*I - d*P - (D + I)^2 / (4 I0) - e*(D + 1)^2 / (g P + I)
struct SurrogateCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
};

/// f_hat = a + b*D - c*P - d*(D + 1)^2 / (1 + g P)
struct OmaSurrogateCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
};

/// How the slot-0 rate terms are bounded. Slot 0 has constant length D_0,
/// so the default freezes x = D_0 in the composite log bound; the full
/// three-variable surrogate is kept for comparison.
enum class FixedSlotBound { kLogRatio, kFullSurrogate };

/// x * ln(1 + u / v), the quantity every rate surrogate bounds from below.
double rate_term(double x, double u, double v);

/// Concave minorant of x ln(1 + u/v) in (x, u, v), tight at (x0, u0, v0).
double rate_lower_bound(double x, double u, double v, double x0, double u0, double v0);

/// 2 + ln(u0 + v0) - ln(v0) - (u0 + v0)/(u + v) - v/v0 <= ln(1 + u/v).
double ln_ratio_lower_bound(double u, double v, double u0, double v0);

SurrogateCoeffs surrogate_coeffs(const Scenario& scenario, const ExpansionPoint& point,
                                 UserIndex m, SlotIndex j);

/// Surrogate of the slot-j term of user m. `interference` is I_mj evaluated
/// at the query powers, so the caller controls all coupled variables.
double f_surrogate(const Scenario& scenario, const ExpansionPoint& point, UserIndex m, SlotIndex j,
                   double power, double interference, double extension);

/// D_0 * ln_ratio_lower_bound(g P, I; g P0, I0) for the slot-0 term of user m.
double fixed_slot_surrogate(const Scenario& scenario, const ExpansionPoint& point, UserIndex m,
                            double power, double interference);

/// Sum of the slot surrogates of user m at `alloc`, as used in the rate
/// constraint of the convex subproblem.
double noma_rate_surrogate(const Scenario& scenario, const ExpansionPoint& point,
                           const NomaAllocation& alloc, UserIndex m,
                           FixedSlotBound mode = FixedSlotBound::kLogRatio);

/// Convex upper bound of D * P that is tight at (P0, D0).
double q_majorant(double power, double extension, double power0, double extension0);

/// Left side of the convexified energy constraint at `alloc`.
double noma_energy_majorant(const Scenario& scenario, const ExpansionPoint& point,
                            const NomaAllocation& alloc);

OmaSurrogateCoeffs oma_surrogate_coeffs(const Scenario& scenario, double power0, double slot0,
                                        UserIndex m);

double f_hat(const Scenario& scenario, double power0, double slot0, UserIndex m, double power,
             double slot);

}  // namespace nomamec
