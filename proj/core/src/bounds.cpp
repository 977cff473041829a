#include "nomamec/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace nomamec {

namespace {

void domain(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

bool nonneg(double v) { return std::isfinite(v) && v >= 0.0; }
bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

ExpansionPoint ExpansionPoint::initial(const Scenario& scenario) {
  ExpansionPoint point{TriangularMatrix<double>(scenario.user_count()),
                       std::vector<double>(scenario.user_count(), 0.0)};
  point.extensions[0] = scenario.deadline(0);
  return point;
}

ExpansionPoint ExpansionPoint::from(const NomaAllocation& alloc) {
  return {alloc.powers(), std::vector<double>(alloc.extensions().begin(), alloc.extensions().end())};
}

void ExpansionPoint::validate(const Scenario& scenario) const {
  if (powers.order() != scenario.user_count() || extensions.size() != scenario.user_count())
    throw std::invalid_argument("expansion point does not match scenario");
  for (double p : powers.values())
    if (!nonneg(p)) throw std::invalid_argument("expansion point powers must be nonnegative");
  for (double d : extensions)
    if (!nonneg(d)) throw std::invalid_argument("expansion point extensions must be nonnegative");
}

double ExpansionPoint::interference(const Scenario& scenario, UserIndex m, SlotIndex j) const {
  double total = 1.0;
  for (std::size_t i = j; i < m; ++i) total += scenario.gain(i) * powers(i, j);
  return total;
}

double rate_term(double x, double u, double v) { return x * std::log1p(u / v); }

double rate_lower_bound(double x, double u, double v, double x0, double u0, double v0) {
  domain(nonneg(x) && nonneg(u) && positive(v), "rate_lower_bound: need x >= 0, u >= 0, v > 0");
  domain(nonneg(x0) && nonneg(u0) && positive(v0),
         "rate_lower_bound: need x0 >= 0, u0 >= 0, v0 > 0");
  const double s0 = u0 + v0;
  const double slope = 0.5 * (x0 / v0 - 1.0);
  const double cross = (x0 - 1.0) * (x0 - 1.0) / (4.0 * s0);
  return 0.5 * (1.0 - x0) - (x0 - v0) * (x0 - v0) / (4.0 * v0) +
         (2.0 + std::log1p(u0 / v0) + 0.5 * (x0 - 1.0) + slope) * x - (cross + slope) * v -
         cross * u - (x + v) * (x + v) / (4.0 * v0) - s0 * (x + 1.0) * (x + 1.0) / (4.0 * (u + v));
}

double ln_ratio_lower_bound(double u, double v, double u0, double v0) {
  domain(nonneg(u) && positive(v) && nonneg(u0) && positive(v0),
         "ln_ratio_lower_bound: need u, u0 >= 0 and v, v0 > 0");
  const double s0 = u0 + v0;
  return 2.0 + std::log(s0) - std::log(v0) - s0 / (u + v) - v / v0;
}

SurrogateCoeffs surrogate_coeffs(const Scenario& scenario, const ExpansionPoint& point,
                                 UserIndex m, SlotIndex j) {
  if (m >= scenario.user_count() || j > m) throw std::out_of_range("surrogate index out of range");
  const double g = scenario.gain(m);
  const double p0 = point.powers(m, j);
  const double d0 = point.extensions[j];
  const double i0 = point.interference(scenario, m, j);
  const double s0 = g * p0 + i0;
  const double slope = 0.5 * (d0 / i0 - 1.0);
  const double sq = (d0 - 1.0) * (d0 - 1.0);

  SurrogateCoeffs k;
  k.a = 0.5 * (1.0 - d0) - 0.25 * (d0 - i0) * (d0 - i0) / i0;
  k.b = 2.0 + std::log1p(g * p0 / i0) + 0.5 * (d0 - 1.0) + slope;
  k.c = 0.25 * sq / s0 + slope;
  k.d = 0.25 * sq * g / s0;
  k.e = 0.25 * s0;
  return k;
}

double f_surrogate(const Scenario& scenario, const ExpansionPoint& point, UserIndex m, SlotIndex j,
                   double power, double interference, double extension) {
  domain(nonneg(power) && std::isfinite(interference) && interference >= 1.0 && nonneg(extension),
         "f_surrogate: need P >= 0, I >= 1, D >= 0");
  const SurrogateCoeffs k = surrogate_coeffs(scenario, point, m, j);
  const double i0 = point.interference(scenario, m, j);
  const double g = scenario.gain(m);
  return k.a + k.b * extension - k.c * interference - k.d * power -
         (extension + interference) * (extension + interference) / (4.0 * i0) -
         k.e * (extension + 1.0) * (extension + 1.0) / (g * power + interference);
}

double fixed_slot_surrogate(const Scenario& scenario, const ExpansionPoint& point, UserIndex m,
                            double power, double interference) {
  const double g = scenario.gain(m);
  return scenario.deadline(0) * ln_ratio_lower_bound(g * power, interference,
                                                     g * point.powers(m, 0),
                                                     point.interference(scenario, m, 0));
}

double noma_rate_surrogate(const Scenario& scenario, const ExpansionPoint& point,
                           const NomaAllocation& alloc, UserIndex m, FixedSlotBound mode) {
  double total = 0.0;
  for (std::size_t j = 0; j <= m; ++j) {
    const double p = alloc.power(m, j);
    const double i = interference(alloc, scenario, m, j);
    if (j == 0 && mode == FixedSlotBound::kLogRatio)
      total += fixed_slot_surrogate(scenario, point, m, p, i);
    else
      total += f_surrogate(scenario, point, m, j, p, i, alloc.extension(j));
  }
  return total;
}

double q_majorant(double power, double extension, double power0, double extension0) {
  const double sum = extension + power;
  const double diff0 = extension0 - power0;
  return 0.25 * sum * sum + 0.25 * diff0 * diff0 - 0.5 * diff0 * (extension - power);
}

double noma_energy_majorant(const Scenario& scenario, const ExpansionPoint& point,
                            const NomaAllocation& alloc) {
  double total = 0.0;
  for (std::size_t m = 0; m < scenario.user_count(); ++m) {
    total += scenario.deadline(0) * alloc.power(m, 0);
    for (std::size_t j = 1; j <= m; ++j)
      total += q_majorant(alloc.power(m, j), alloc.extension(j), point.powers(m, j),
                          point.extensions[j]);
  }
  return total;
}

OmaSurrogateCoeffs oma_surrogate_coeffs(const Scenario& scenario, double power0, double slot0,
                                        UserIndex m) {
  domain(nonneg(power0) && nonneg(slot0), "oma_surrogate_coeffs: expansion point must be >= 0");
  const double g = scenario.gain(m);
  const double s0 = 1.0 + g * power0;
  const double sq = (slot0 - 1.0) * (slot0 - 1.0);
  OmaSurrogateCoeffs k;
  k.a = 0.25 * (1.0 - slot0 * slot0 + sq * g * power0 / s0);
  k.b = 1.0 + std::log(s0) + 0.5 * (slot0 - 1.0);
  k.c = 0.25 * g * sq / s0;
  k.d = 0.25 * s0;
  return k;
}

double f_hat(const Scenario& scenario, double power0, double slot0, UserIndex m, double power,
             double slot) {
  domain(nonneg(power) && nonneg(slot), "f_hat: need P >= 0, D >= 0");
  const OmaSurrogateCoeffs k = oma_surrogate_coeffs(scenario, power0, slot0, m);
  return k.a + k.b * slot - k.c * power -
         k.d * (slot + 1.0) * (slot + 1.0) / (1.0 + scenario.gain(m) * power);
}

}  // namespace nomamec
