#include "nomamec/subproblem.hpp"

#include <cmath>
#include <string>

namespace nomamec {

namespace {

struct AffineExpr {
  std::vector<LinearTerm> terms;
  double constant = 0.0;

  AffineExpr& add(VariableIndex v, double coefficient) {
    if (coefficient != 0.0) terms.push_back({v, coefficient});
    return *this;
  }
  AffineExpr& add(const AffineExpr& other, double scale) {
    for (const auto& t : other.terms) add(t.variable, scale * t.coefficient);
    constant += scale * other.constant;
    return *this;
  }
};

class Builder {
 public:
  explicit Builder(ConicProblem& problem) : problem_(problem) {}

  VariableIndex variable(std::string name, double lower_bound = ConicProblem::kFree) {
    return problem_.add_variable(std::move(name), lower_bound);
  }

  /// New variable pinned to `expr` by an equality row.
  VariableIndex define(std::string name, const AffineExpr& expr) {
    const VariableIndex v = variable(name);
    LinearRow row{{{v, 1.0}}, RowSense::kEqual, expr.constant, "def " + name};
    for (const auto& t : expr.terms) row.terms.push_back({t.variable, -t.coefficient});
    problem_.add_row(std::move(row));
    return v;
  }

  void equal(std::vector<LinearTerm> terms, double rhs, std::string label) {
    problem_.add_row({std::move(terms), RowSense::kEqual, rhs, std::move(label)});
  }

  /// expr <= rhs
  void less_equal(const AffineExpr& expr, double rhs, std::string label) {
    problem_.add_row({expr.terms, RowSense::kLessEqual, rhs - expr.constant, std::move(label)});
  }

  void cone(ConeKind kind, std::vector<VariableIndex> members, std::string label) {
    problem_.add_cone({kind, std::move(members), std::move(label)});
  }

  /// Returns t with t >= q^2 via ||(q, (1 - t)/2)|| <= (1 + t)/2.
  AffineExpr square_epigraph(const std::string& tag, const AffineExpr& q) {
    const VariableIndex hi = variable("sq_hi" + tag);
    const VariableIndex lo = variable("sq_lo" + tag);
    const VariableIndex arg = define("sq_arg" + tag, q);
    equal({{hi, 1.0}, {lo, 1.0}}, 1.0, "sq_sum" + tag);
    cone(ConeKind::kSecondOrder, {hi, arg, lo}, "square" + tag);
    AffineExpr t;
    t.add(hi, 1.0).add(lo, -1.0);
    return t;
  }

  /// Returns s with s >= num^2 / den via the rotated cone 2 s (den/2) >= num^2.
  VariableIndex quad_over_lin(const std::string& tag, const AffineExpr& num, const AffineExpr& den) {
    const VariableIndex s = variable("qol" + tag);
    AffineExpr half_den;
    half_den.add(den, 0.5);
    const VariableIndex w = define("qol_den" + tag, half_den);
    const VariableIndex z = define("qol_num" + tag, num);
    cone(ConeKind::kRotatedSecondOrder, {s, w, z}, "quad_over_lin" + tag);
    return s;
  }

  void proximal(VariableIndex objective, double weight, const std::vector<VariableIndex>& vars,
                const std::vector<double>& centre) {
    const VariableIndex tau = variable("prox");
    AffineExpr half;
    half.constant = 0.5;
    std::vector<VariableIndex> members{tau, define("prox_half", half)};
    for (std::size_t k = 0; k < vars.size(); ++k) {
      AffineExpr diff;
      diff.add(vars[k], 1.0).constant = -centre[k];
      members.push_back(define("prox_d" + std::to_string(k), diff));
    }
    cone(ConeKind::kRotatedSecondOrder, std::move(members), "proximal");
    problem_.set_objective(objective, 1.0);
    problem_.set_objective(tau, -weight);
  }

 private:
  ConicProblem& problem_;
};

std::string pair_tag(std::size_t m, std::size_t j) {
  return "[" + std::to_string(m) + "," + std::to_string(j) + "]";
}

std::string tag(std::size_t m) { return "[" + std::to_string(m) + "]"; }

double clamp_value(double v, const std::string& what) {
  if (!std::isfinite(v) || v < -kClampThreshold)
    throw SolverFailure(SolveStatus::kNumericalFailure,
                        what + " came back negative (" + std::to_string(v) + ")");
  return v < kClampThreshold ? 0.0 : v;
}

void require_optimal(const ConicSolution& solution) {
  if (solution.status != SolveStatus::kOptimal)
    throw SolverFailure(solution.status,
                        "conic solve ended with status " + std::string(to_string(solution.status)));
}

}  // namespace

NomaSubproblem build_noma_subproblem(const Scenario& scenario, const ExpansionPoint& point,
                                     const SubproblemOptions& options) {
  point.validate(scenario);
  const std::size_t users = scenario.user_count();
  const double d0 = scenario.deadline(0);

  NomaSubproblem sub{ConicProblem{}, NomaIndexMap{TriangularMatrix<VariableIndex>(users, -1),
                                                 std::vector<VariableIndex>(users, -1), -1}};
  Builder b(sub.problem);
  auto& map = sub.map;
  for (std::size_t m = 0; m < users; ++m)
    for (std::size_t j = 0; j <= m; ++j) map.powers(m, j) = b.variable("P" + pair_tag(m, j), 0.0);
  for (std::size_t j = 1; j < users; ++j) map.extensions[j] = b.variable("D" + tag(j), 0.0);
  map.objective = b.variable("ell");
  sub.problem.set_objective(map.objective, 1.0);

  auto extension_expr = [&](std::size_t j) {
    AffineExpr e;
    if (j == 0)
      e.constant = d0;
    else
      e.add(map.extensions[j], 1.0);
    return e;
  };
  auto interference_expr = [&](std::size_t m, std::size_t j) {
    AffineExpr e;
    e.constant = 1.0;
    for (std::size_t i = j; i < m; ++i) e.add(map.powers(i, j), scenario.gain(i));
    return e;
  };

  // ell - sum_j f_mj <= 0 for every user.
  for (std::size_t m = 0; m < users; ++m) {
    const double g = scenario.gain(m);
    AffineExpr row;
    row.add(map.objective, 1.0);
    for (std::size_t j = 0; j <= m; ++j) {
      const std::string t = pair_tag(m, j);
      const AffineExpr interf = interference_expr(m, j);
      AffineExpr received = interf;
      received.add(map.powers(m, j), g);
      const double i0 = point.interference(scenario, m, j);

      if (j == 0 && options.fixed_slot == FixedSlotBound::kLogRatio) {
        // D_0 [2 + ln S0 - ln I0 - S0/(gP + I) - I/I0]
        const double s0 = g * point.powers(m, 0) + i0;
        AffineExpr root;
        root.constant = std::sqrt(s0);
        const VariableIndex ratio = b.quad_over_lin(t, root, received);
        row.add(ratio, d0).add(interf, d0 / i0);
        row.constant -= d0 * (2.0 + std::log(s0) - std::log(i0));
        continue;
      }

      const SurrogateCoeffs k = surrogate_coeffs(scenario, point, m, j);
      const AffineExpr ext = extension_expr(j);
      // (D + I)^2 <= 4 I0 t  <=>  ||(D + I, t - I0)|| <= t + I0
      const VariableIndex upper = b.variable("rq_hi" + t);
      const VariableIndex lower = b.variable("rq_lo" + t);
      AffineExpr sum = ext;
      sum.add(interf, 1.0);
      const VariableIndex arg = b.define("rq_arg" + t, sum);
      b.equal({{upper, 1.0}, {lower, -1.0}}, 2.0 * i0, "rq_gap" + t);
      b.cone(ConeKind::kSecondOrder, {upper, arg, lower}, "rate_square" + t);

      AffineExpr num = ext;
      num.constant += 1.0;
      AffineExpr scaled;
      scaled.add(num, std::sqrt(k.e));
      const VariableIndex frac = b.quad_over_lin(t, scaled, received);

      row.add(ext, -k.b).add(interf, k.c).add(map.powers(m, j), k.d);
      row.add(upper, 0.5).add(lower, 0.5).add(frac, 1.0);
      row.constant -= k.a;
    }
    b.less_equal(row, 0.0, "rate" + tag(m));
  }

  // Slot 0 energy is exactly linear; later slots use the majorant q.
  AffineExpr energy;
  for (std::size_t m = 0; m < users; ++m) {
    energy.add(map.powers(m, 0), d0);
    for (std::size_t j = 1; j <= m; ++j) {
      AffineExpr sum;
      sum.add(map.extensions[j], 1.0).add(map.powers(m, j), 1.0);
      const AffineExpr sq = b.square_epigraph(pair_tag(m, j), sum);
      const double diff0 = point.extensions[j] - point.powers(m, j);
      energy.add(sq, 0.25);
      energy.add(map.extensions[j], -0.5 * diff0).add(map.powers(m, j), 0.5 * diff0);
      energy.constant += 0.25 * diff0 * diff0;
    }
  }
  b.less_equal(energy, scenario.energy_budget(), "energy");

  for (std::size_t m = 1; m < users; ++m) {
    AffineExpr elapsed;
    for (std::size_t j = 1; j <= m; ++j) elapsed.add(map.extensions[j], 1.0);
    b.less_equal(elapsed, scenario.deadline(m) - d0, "deadline" + tag(m));
  }
  for (std::size_t j = 0; j < users; ++j) {
    AffineExpr total;
    for (std::size_t m = j; m < users; ++m) total.add(map.powers(m, j), 1.0);
    b.less_equal(total, scenario.power_budget(), "power" + tag(j));
  }

  if (options.proximal_weight) {
    std::vector<VariableIndex> vars;
    std::vector<double> centre;
    for (std::size_t m = 0; m < users; ++m)
      for (std::size_t j = 0; j <= m; ++j) {
        vars.push_back(map.powers(m, j));
        centre.push_back(point.powers(m, j));
      }
    for (std::size_t j = 1; j < users; ++j) {
      vars.push_back(map.extensions[j]);
      centre.push_back(point.extensions[j]);
    }
    b.proximal(map.objective, *options.proximal_weight, vars, centre);
  }
  return sub;
}

int noma_auxiliary_count(std::size_t users, const SubproblemOptions& options) {
  const int m = static_cast<int>(users);
  const int later_pairs = m * (m - 1) / 2;
  // Slot 0: one rotated cone (3 variables) or the full surrogate (6).
  const int slot0 = options.fixed_slot == FixedSlotBound::kLogRatio ? 3 : 6;
  int count = slot0 * m + 6 * later_pairs + 3 * later_pairs;
  if (options.proximal_weight) count += 2 + m * (m + 1) / 2 + (m - 1);
  return count;
}

OmaSubproblem build_oma_subproblem(const Scenario& scenario, const OmaAllocation& point,
                                   const SubproblemOptions& options) {
  const std::size_t users = scenario.user_count();
  if (point.user_count() != users) throw std::invalid_argument("expansion point does not match scenario");

  OmaSubproblem sub{ConicProblem{}, OmaIndexMap{std::vector<VariableIndex>(users),
                                               std::vector<VariableIndex>(users), -1}};
  Builder b(sub.problem);
  auto& map = sub.map;
  for (std::size_t m = 0; m < users; ++m) map.powers[m] = b.variable("P" + tag(m), 0.0);
  for (std::size_t m = 0; m < users; ++m) map.slots[m] = b.variable("D" + tag(m), 0.0);
  map.objective = b.variable("phi");
  sub.problem.set_objective(map.objective, 1.0);

  for (std::size_t m = 0; m < users; ++m) {
    const double g = scenario.gain(m);
    const OmaSurrogateCoeffs k = oma_surrogate_coeffs(scenario, point.power(m), point.slot(m), m);
    AffineExpr num;
    num.add(map.slots[m], std::sqrt(k.d)).constant = std::sqrt(k.d);
    AffineExpr den;
    den.add(map.powers[m], g).constant = 1.0;
    const VariableIndex frac = b.quad_over_lin(tag(m), num, den);

    AffineExpr row;
    row.add(map.objective, 1.0).add(map.slots[m], -k.b).add(map.powers[m], k.c).add(frac, 1.0);
    b.less_equal(row, k.a, "rate" + tag(m));
  }

  AffineExpr energy;
  for (std::size_t m = 0; m < users; ++m) {
    AffineExpr sum;
    sum.add(map.slots[m], 1.0).add(map.powers[m], 1.0);
    const AffineExpr sq = b.square_epigraph(tag(m), sum);
    const double diff0 = point.slot(m) - point.power(m);
    energy.add(sq, 0.25).add(map.slots[m], -0.5 * diff0).add(map.powers[m], 0.5 * diff0);
    energy.constant += 0.25 * diff0 * diff0;
  }
  b.less_equal(energy, scenario.energy_budget(), "energy");

  for (std::size_t m = 0; m < users; ++m) {
    AffineExpr elapsed;
    for (std::size_t j = 0; j <= m; ++j) elapsed.add(map.slots[j], 1.0);
    b.less_equal(elapsed, scenario.deadline(m), "deadline" + tag(m));
    AffineExpr power;
    power.add(map.powers[m], 1.0);
    b.less_equal(power, scenario.power_budget(), "power" + tag(m));
  }

  if (options.proximal_weight) {
    std::vector<VariableIndex> vars;
    std::vector<double> centre;
    for (std::size_t m = 0; m < users; ++m) {
      vars.push_back(map.powers[m]);
      centre.push_back(point.power(m));
      vars.push_back(map.slots[m]);
      centre.push_back(point.slot(m));
    }
    b.proximal(map.objective, *options.proximal_weight, vars, centre);
  }
  return sub;
}

NomaExtract extract(const ConicSolution& solution, const NomaIndexMap& map,
                    const Scenario& scenario) {
  require_optimal(solution);
  const std::size_t users = scenario.user_count();
  TriangularMatrix<double> powers(users);
  for (std::size_t m = 0; m < users; ++m)
    for (std::size_t j = 0; j <= m; ++j)
      powers(m, j) = clamp_value(solution.primal.at(map.powers(m, j)), "P" + pair_tag(m, j));
  std::vector<double> extensions(users, 0.0);
  extensions[0] = scenario.deadline(0);
  for (std::size_t j = 1; j < users; ++j)
    extensions[j] = clamp_value(solution.primal.at(map.extensions[j]), "D" + tag(j));
  return {NomaAllocation(scenario, std::move(powers), std::move(extensions)),
          solution.primal.at(map.objective)};
}

OmaExtract extract(const ConicSolution& solution, const OmaIndexMap& map) {
  require_optimal(solution);
  std::vector<double> powers;
  std::vector<double> slots;
  for (std::size_t m = 0; m < map.powers.size(); ++m) {
    powers.push_back(clamp_value(solution.primal.at(map.powers[m]), "P" + tag(m)));
    slots.push_back(clamp_value(solution.primal.at(map.slots[m]), "D" + tag(m)));
  }
  return {OmaAllocation(std::move(powers), std::move(slots)), solution.primal.at(map.objective)};
}

}  // namespace nomamec
