#include "nomamec/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nomamec {
namespace {

constexpr std::size_t kMaxDims = 8;
constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

using Point = std::array<double, kMaxDims>;
/// Objective at a grid point, kInfeasible outside the feasible set.
using Evaluator = std::function<double(const Point&)>;

struct Box {
  std::vector<double> lower, upper, step;
};

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> v;
  if (hi <= lo) return {lo};
  const auto count = static_cast<long long>(std::floor((hi - lo) / step * (1.0 + 1e-12)));
  for (long long i = 0; i <= count; ++i) v.push_back(std::min(hi, lo + static_cast<double>(i) * step));
  if (v.back() < hi) v.push_back(hi);
  return v;
}

struct Search {
  const Evaluator& eval;
  std::size_t dims;
  double best = kInfeasible;
  Point incumbent{};
  long long evaluations = 0;

  // Odometer over the product of axes. With slopes set, also records the
  // largest forward difference quotient per coordinate.
  void scan(const std::vector<std::vector<double>>& axes, std::vector<double>* slopes) {
    std::vector<std::size_t> idx(dims, 0);
    Point x{};
    for (std::size_t d = 0; d < dims; ++d) x[d] = axes[d][0];
    while (true) {
      const double f = eval(x);
      ++evaluations;
      if (f > best) {
        best = f;
        incumbent = x;
      }
      if (slopes && f != kInfeasible) {
        for (std::size_t d = 0; d < dims; ++d) {
          if (idx[d] + 1 >= axes[d].size()) continue;
          Point y = x;
          y[d] = axes[d][idx[d] + 1];
          const double g = eval(y);
          ++evaluations;
          if (g == kInfeasible) continue;
          (*slopes)[d] = std::max((*slopes)[d], std::abs(g - f) / (y[d] - x[d]));
        }
      }
      std::size_t d = 0;
      for (; d < dims; ++d) {
        if (++idx[d] < axes[d].size()) {
          x[d] = axes[d][idx[d]];
          break;
        }
        idx[d] = 0;
        x[d] = axes[d][0];
      }
      if (d == dims) return;
    }
  }
};

struct GridOutcome {
  double objective = kInfeasible;
  Point point{};
  double grid_error = 0.0;
  long long evaluations = 0;
};

GridOutcome grid_search(const Evaluator& eval, const Box& box, int rounds) {
  const std::size_t dims = box.lower.size();
  Search search{eval, dims};
  GridOutcome out;
  if (dims == 0) {
    out.objective = eval(Point{});
    out.evaluations = 1;
    return out;
  }
  std::vector<double> step = box.step;
  std::vector<std::vector<double>> axes(dims);
  for (std::size_t d = 0; d < dims; ++d) axes[d] = axis(box.lower[d], box.upper[d], step[d]);
  std::vector<double> slopes(dims, 0.0);
  search.scan(axes, rounds == 0 ? &slopes : nullptr);

  for (int r = 1; r <= rounds && search.best != kInfeasible; ++r) {
    const Point center = search.incumbent;
    for (std::size_t d = 0; d < dims; ++d) {
      const double lo = std::max(box.lower[d], center[d] - step[d]);
      const double hi = std::min(box.upper[d], center[d] + step[d]);
      step[d] /= 10.0;
      axes[d] = axis(lo, hi, step[d]);
    }
    search.scan(axes, r == rounds ? &slopes : nullptr);
  }
  out.objective = search.best;
  out.point = search.incumbent;
  out.evaluations = search.evaluations;
  for (std::size_t d = 0; d < dims; ++d) out.grid_error += slopes[d] * step[d];
  return out;
}

// Largest p with rest + length * p <= budget in floating point, capped at cap.
double exact_power(double rest, double length, double budget, double cap) {
  if (length <= 0.0) return cap;
  double p = std::min(cap, (budget - rest) / length);
  while (p > 0.0 && rest + length * p > budget) p = std::nextafter(p, 0.0);
  return std::max(p, 0.0);
}

struct NomaLayout {
  std::size_t users;
  // Gridded powers in (m, j) order without the last diagonal entry, then
  // extensions 1..M-1.
  std::size_t power_dims() const { return users * (users + 1) / 2 - 1; }
  std::size_t dims() const { return power_dims() + users - 1; }
};

NomaAllocation noma_point(const Scenario& s, const NomaLayout& layout, const Point& x,
                          bool* feasible) {
  const std::size_t M = layout.users;
  TriangularMatrix<double> P(M, 0.0);
  std::vector<double> ext(M);
  ext[0] = s.deadline(0);
  for (std::size_t j = 1; j < M; ++j) ext[j] = x[layout.power_dims() + j - 1];
  std::size_t k = 0;
  double rest = 0.0;
  for (std::size_t m = 0; m < M; ++m)
    for (std::size_t j = 0; j <= m; ++j) {
      if (m == M - 1 && j == m) break;
      P(m, j) = x[k++];
      rest += ext[j] * P(m, j);
    }
  bool ok = rest <= s.energy_budget();
  double elapsed = ext[0];
  for (std::size_t m = 1; m < M && ok; ++m) {
    elapsed += ext[m];
    ok = s.deadline(m) - elapsed >= 0.0;
  }
  for (std::size_t j = 0; j + 1 < M && ok; ++j) {
    double sum = 0.0;
    for (std::size_t m = j; m < M; ++m) sum += P(m, j);
    ok = s.power_budget() - sum >= 0.0;
  }
  if (ok) P(M - 1, M - 1) = exact_power(rest, ext[M - 1], s.energy_budget(), s.power_budget());
  *feasible = ok;
  return NomaAllocation(s, std::move(P), std::move(ext));
}

OmaAllocation oma_point(const Scenario& s, const Point& x, bool* feasible) {
  const std::size_t M = s.user_count();
  std::vector<double> power(M), slot(M);
  for (std::size_t m = 0; m < M; ++m) slot[m] = x[M - 1 + m];
  double rest = 0.0;
  for (std::size_t m = 0; m + 1 < M; ++m) {
    power[m] = x[m];
    rest += slot[m] * power[m];
  }
  bool ok = rest <= s.energy_budget();
  double elapsed = 0.0;
  for (std::size_t m = 0; m < M && ok; ++m) {
    elapsed += slot[m];
    ok = s.deadline(m) - elapsed >= 0.0;
  }
  if (ok) power[M - 1] = exact_power(rest, slot[M - 1], s.energy_budget(), s.power_budget());
  *feasible = ok;
  return OmaAllocation(std::move(power), std::move(slot));
}

}  // namespace

void GridSpec::validate() const {
  if (!(power_step > 0.0) || !(time_step > 0.0)) throw std::invalid_argument("grid steps must be positive");
  if (refinement_rounds < 0) throw std::invalid_argument("refinement_rounds must be nonnegative");
}

NomaOracleResult brute_force_noma(const Scenario& s, const GridSpec& grid) {
  grid.validate();
  const std::size_t M = s.user_count();
  if (M > kOracleMaxNomaUsers)
    throw std::invalid_argument("brute_force_noma supports at most " +
                                std::to_string(kOracleMaxNomaUsers) + " users");
  const NomaLayout layout{M};
  Box box;
  for (std::size_t k = 0; k < layout.power_dims(); ++k) {
    box.lower.push_back(0.0);
    box.upper.push_back(s.power_budget());
    box.step.push_back(grid.power_step);
  }
  for (std::size_t j = 1; j < M; ++j) {
    box.lower.push_back(0.0);
    box.upper.push_back(s.deadline(j) - s.deadline(0));
    box.step.push_back(grid.time_step);
  }
  const Evaluator eval = [&](const Point& x) {
    bool feasible = false;
    const NomaAllocation a = noma_point(s, layout, x, &feasible);
    return feasible ? min_offloaded_nats(a, s) : kInfeasible;
  };
  const GridOutcome g = grid_search(eval, box, grid.refinement_rounds);
  bool feasible = false;
  NomaOracleResult result{g.objective, noma_point(s, layout, g.point, &feasible), g.grid_error,
                          g.evaluations};
  return result;
}

OmaOracleResult brute_force_oma(const Scenario& s, const GridSpec& grid) {
  grid.validate();
  const std::size_t M = s.user_count();
  if (M > kOracleMaxOmaUsers)
    throw std::invalid_argument("brute_force_oma supports at most " +
                                std::to_string(kOracleMaxOmaUsers) + " users");
  Box box;
  for (std::size_t m = 0; m + 1 < M; ++m) {
    box.lower.push_back(0.0);
    box.upper.push_back(s.power_budget());
    box.step.push_back(grid.power_step);
  }
  for (std::size_t m = 0; m < M; ++m) {
    box.lower.push_back(0.0);
    box.upper.push_back(s.deadline(m));
    box.step.push_back(grid.time_step);
  }
  const Evaluator eval = [&](const Point& x) {
    bool feasible = false;
    const OmaAllocation a = oma_point(s, x, &feasible);
    return feasible ? min_offloaded_nats_oma(a, s) : kInfeasible;
  };
  const GridOutcome g = grid_search(eval, box, grid.refinement_rounds);
  bool feasible = false;
  return {g.objective, oma_point(s, g.point, &feasible), g.grid_error, g.evaluations};
}

}  // namespace nomamec
