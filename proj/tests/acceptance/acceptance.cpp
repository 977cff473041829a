// Acceptance checks. Prints one PASS/FAIL line per criterion; detail lines
// are indented. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nomamec/bounds.hpp"
#include "nomamec/channel.hpp"
#include "nomamec/experiment.hpp"
#include "nomamec/oracle.hpp"
#include "nomamec/sca.hpp"

namespace {

using namespace nomamec;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  std::mt19937_64 rng_;
};

struct Outcome {
  bool pass;
  std::string summary;
};

double rate(double D, double g, double P, double I) { return D * std::log1p(g * P / I); }

// Random scenario plus expansion point with entries in (0, 10].
struct Instance {
  Scenario scenario;
  ExpansionPoint point;
};

Instance random_instance(Draws& r, std::size_t M) {
  std::vector<double> g(M), d(M);
  double t = r(0.1, 2);
  for (std::size_t m = 0; m < M; ++m) {
    g[m] = r(1e-3, 10);
    d[m] = t;
    t += r(0, 10);
  }
  Scenario s(g, d, 10, 10);
  ExpansionPoint p = ExpansionPoint::initial(s);
  for (auto& v : p.powers.values()) v = r(0, 10);
  for (std::size_t j = 1; j < M; ++j) p.extensions[j] = r(0, 10);
  return {s, p};
}

Outcome criterion1() {
  const auto start = Clock::now();
  Draws r(101);
  long checks = 0, violations = 0;
  double worst = 0;
  auto check = [&](double excess) {
    ++checks;
    worst = std::max(worst, excess);
    if (excess > 1e-12) ++violations;
  };
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    const double x = r(0, 10), u = r(0, 10), v = r(1e-3, 10), x0 = r(0, 10), u0 = r(0, 10), v0 = r(1e-3, 10);
    check(rate_lower_bound(x, u, v, x0, u0, v0) - rate_term(x, u, v));

    const auto [s, p] = random_instance(r, 3);
    const std::size_t m = 1 + k % 2, j = 1 + (k / 2) % m;
    const double P = r(0, 10), I = r(1, 30), D = r(0, 10);
    check(f_surrogate(s, p, m, j, P, I, D) - rate(D, s.gain(m), P, I));
    check(fixed_slot_surrogate(s, p, m, P, I) - rate(s.deadline(0), s.gain(m), P, I));

    const double P0 = r(0, 10), S0 = r(0, 10), S = r(0, 10);
    check(f_hat(s, P0, S0, m, P, S) - rate(S, s.gain(m), P, 1));
    check(D * P - q_majorant(P, D, P0, S0));
  }
  const double elapsed = seconds_since(start);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%ld checks over %d tuples, %ld violations, worst excess %.2e, %.2f s", checks, n,
                violations, worst, elapsed);
  return {violations == 0 && elapsed < 10.0, buf};
}

Outcome criterion2() {
  Draws r(202);
  const double h = 1e-5;
  long checks = 0, failures = 0;
  double worst_value = 0, worst_gradient = 0;
  auto value = [&](double got, double want) {
    ++checks;
    const double e = std::abs(got - want);
    worst_value = std::max(worst_value, e);
    if (e > 1e-9) ++failures;
  };
  auto gradient = [&](double fd, double want) {
    ++checks;
    const double e = std::abs(fd - want) / std::max(1.0, std::abs(want));
    worst_gradient = std::max(worst_gradient, e);
    if (e > 1e-5) ++failures;
  };
  for (int k = 0; k < 1000; ++k) {
    const auto [s, p] = random_instance(r, 3);
    const std::size_t m = 1 + k % 2, j = 1 + (k / 2) % m;
    const double g = s.gain(m), P0 = p.powers(m, j), I0 = p.interference(s, m, j), D0 = p.extensions[j];
    auto f = [&](double P, double I, double D) { return f_surrogate(s, p, m, j, P, I, D); };
    value(f(P0, I0, D0), rate(D0, g, P0, I0));
    gradient((f(P0 + h, I0, D0) - f(P0 - h, I0, D0)) / (2 * h), D0 * g / (I0 + g * P0));
    // I >= 1, so one-sided second-order differences at I0 = 1.
    const double dI = I0 - h >= 1 ? (f(P0, I0 + h, D0) - f(P0, I0 - h, D0)) / (2 * h)
                                  : (-3 * f(P0, I0, D0) + 4 * f(P0, I0 + h, D0) - f(P0, I0 + 2 * h, D0)) / (2 * h);
    gradient(dI, D0 * (1 / (I0 + g * P0) - 1 / I0));
    gradient((f(P0, I0, D0 + h) - f(P0, I0, D0 - h)) / (2 * h), std::log1p(g * P0 / I0));

    const double x0 = r(0, 10), u0 = r(0, 10), v0 = r(1e-2, 10);
    auto t = [&](double x, double u, double v) { return rate_lower_bound(x, u, v, x0, u0, v0); };
    value(t(x0, u0, v0), rate_term(x0, u0, v0));
    gradient((t(x0 + h, u0, v0) - t(x0 - h, u0, v0)) / (2 * h), std::log1p(u0 / v0));
    gradient((t(x0, u0 + h, v0) - t(x0, u0 - h, v0)) / (2 * h), x0 / (u0 + v0));
    gradient((t(x0, u0, v0 + h) - t(x0, u0, v0 - h)) / (2 * h), x0 * (1 / (u0 + v0) - 1 / v0));

    const double Q0 = r(0, 10), S0 = r(0, 10);
    auto fh = [&](double P, double S) { return f_hat(s, Q0, S0, m, P, S); };
    value(fh(Q0, S0), rate(S0, g, Q0, 1));
    gradient((fh(Q0 + h, S0) - fh(Q0 - h, S0)) / (2 * h), S0 * g / (1 + g * Q0));
    gradient((fh(Q0, S0 + h) - fh(Q0, S0 - h)) / (2 * h), std::log1p(g * Q0));

    auto q = [&](double P, double D) { return q_majorant(P, D, Q0, S0); };
    value(q(Q0, S0), Q0 * S0);
    gradient((q(Q0 + h, S0) - q(Q0 - h, S0)) / (2 * h), S0);
    gradient((q(Q0, S0 + h) - q(Q0, S0 - h)) / (2 * h), Q0);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%ld checks at 1000 points, %ld failures, worst value error %.2e, worst gradient error %.2e",
                checks, failures, worst_value, worst_gradient);
  return {failures == 0, buf};
}

Scenario random_small_scenario(Draws& r, std::size_t M) {
  std::vector<double> g(M), d(M);
  double t = r(0.5, 1.5);
  for (std::size_t m = 0; m < M; ++m) {
    g[m] = r(0.2, 3);
    d[m] = t;
    t += r(0.2, 1.5);
  }
  const double energy = r(0.5, 6);
  const double power = r(0.5, 3);
  return Scenario(g, d, energy, power);
}

Outcome criterion3() {
  long bad_steps = 0, bad_iterates = 0, failures = 0, iterates = 0;
  for (int k = 0; k < 50; ++k) {
    Draws r(3000 + k);
    const std::size_t M = 2 + k % 3;
    const Scenario s = random_small_scenario(r, M);
    const NomaReport n = solve_noma(s);
    const OmaReport o = solve_oma(s);
    failures += (n.termination == Termination::kSolverFailure) + (o.termination == Termination::kSolverFailure);
    for (const auto* traj : {&n.trajectory, &o.trajectory})
      for (std::size_t i = 1; i < traj->size(); ++i)
        if ((*traj)[i] < (*traj)[i - 1] - 1e-7) ++bad_steps;
    for (const auto& a : n.history) bad_iterates += !audit_noma(a, s, 1e-6).feasible, ++iterates;
    for (const auto& a : o.history) bad_iterates += !audit_oma(a, s, 1e-6).feasible, ++iterates;
    if (n.termination == Termination::kSolverFailure) std::printf("  seed %d: NOMA solver failure: %s\n", 3000 + k, n.failure.c_str());
    if (o.termination == Termination::kSolverFailure) std::printf("  seed %d: OMA solver failure: %s\n", 3000 + k, o.failure.c_str());
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "50 scenarios x 2 schemes, %ld decreasing steps, %ld/%ld infeasible iterates, %ld solver failures",
                bad_steps, bad_iterates, iterates, failures);
  return {bad_steps == 0 && bad_iterates == 0 && failures == 0, buf};
}

Outcome criterion4() {
  const auto start = Clock::now();
  int misses = 0;
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    const int seed = 4000 + k;
    Draws r(seed);
    const Scenario s = random_small_scenario(r, 2);
    double sca, oracle, grid_error;
    const bool noma = k < 10;
    if (noma) {
      const NomaOracleResult b = brute_force_noma(s);
      sca = solve_noma(s).objective();
      oracle = b.objective;
      grid_error = b.grid_error;
    } else {
      const OmaOracleResult b = brute_force_oma(s);
      sca = solve_oma(s).objective();
      oracle = b.objective;
      grid_error = b.grid_error;
    }
    const double diff = std::abs(sca - oracle);
    worst = std::max(worst, diff);
    if (diff > 1e-2 + grid_error) {
      ++misses;
      std::printf("  seed %d (%s): SCA %.6f vs oracle %.6f nats, grid error %.2e\n", seed, noma ? "NOMA" : "OMA", sca,
                  oracle, grid_error);
    }
  }
  const double elapsed = seconds_since(start);
  char buf[200];
  std::snprintf(buf, sizeof buf, "10 NOMA + 10 OMA instances, %d outside tolerance, worst |diff| %.2e nats, %.1f s", misses,
                worst, elapsed);
  return {misses == 0 && elapsed < 300.0, buf};
}

Outcome criterion5() {
  double worst = 0;
  for (int k = 0; k < 20; ++k) {
    Draws r(5000 + k);
    const double g = r(0.05, 5), D = r(0.2, 4), E = r(0.1, 20), Pt = r(0.1, 10);
    const Scenario s({g}, {D}, E, Pt);
    const double closed = D * std::log1p(g * std::min(Pt, E / D));
    worst = std::max({worst, std::abs(solve_noma(s).objective() - closed), std::abs(solve_oma(s).objective() - closed)});
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "20 single-user instances, worst error %.2e nats (both schemes)", worst);
  return {worst <= 1e-3, buf};
}

ExperimentResult run_logged(const ExperimentSpec& spec) {
  const auto start = Clock::now();
  ExperimentResult r = run_experiment(spec, nullptr);
  std::printf("  (%s sweep: %.0f s, %d failed solves)\n", std::string(to_string(spec.kind)).c_str(), seconds_since(start),
              r.failures);
  return r;
}

double mean(const ExperimentResult& r, std::size_t config, double value, Scheme scheme) {
  const PointResult* p = r.find(config, value, scheme);
  return p ? p->mean_bits : std::nan("");
}

ExperimentSpec paper_spec(ExperimentKind kind) {
  ExperimentSpec s;
  s.kind = kind;
  s.users = 4;
  s.trials = 20;
  s.channel.seed = 2024;
  return s;
}

Outcome criterion6() {
  ExperimentSpec spec = paper_spec(ExperimentKind::kVsEnergy);
  for (double e = 5; e <= 40; e += 5) spec.sweep.push_back(e);
  for (double pt : {5.0, 10.0, 15.0}) spec.configs.push_back({std::nullopt, pt, std::nullopt});
  const ExperimentResult r = run_logged(spec);

  bool monotone = true, saturates = true, noma_wins = true;
  double largest_drop = 0;
  int wins = 0, points = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::printf("  P_t=%g dB  E_th:", spec.configs[c].P_t_db.value());
    for (double e : spec.sweep) std::printf(" %5g", e);
    std::printf("\n    NOMA bits:");
    for (double e : spec.sweep) std::printf(" %.3f", mean(r, c, e, Scheme::kNoma));
    std::printf("\n    OMA  bits:");
    for (double e : spec.sweep) std::printf(" %.3f", mean(r, c, e, Scheme::kOma));
    std::printf("\n");
    for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
      const double n = mean(r, c, spec.sweep[i], Scheme::kNoma), o = mean(r, c, spec.sweep[i], Scheme::kOma);
      if (i > 0 && n < mean(r, c, spec.sweep[i - 1], Scheme::kNoma)) {
        monotone = false;
        largest_drop = std::max(largest_drop, mean(r, c, spec.sweep[i - 1], Scheme::kNoma) - n);
      }
      ++points;
      if (n >= o) ++wins;
      else noma_wins = false;
    }
    if (c < 2) {
      const double late = mean(r, c, 40, Scheme::kNoma) - mean(r, c, 30, Scheme::kNoma);
      const double early = mean(r, c, 15, Scheme::kNoma) - mean(r, c, 5, Scheme::kNoma);
      std::printf("    saturation: increase 30->40 = %.4f, 25%% of 5->15 = %.4f\n", late, 0.25 * early);
      if (!(late < 0.25 * early)) saturates = false;
    }
  }
  char buf[240];
  std::snprintf(buf, sizeof buf, "NOMA nondecreasing: %s (largest drop %.1e bits), saturates: %s, NOMA >= OMA at %d/%d points",
                monotone ? "yes" : "no", largest_drop, saturates ? "yes" : "no", wins, points);
  return {monotone && saturates && noma_wins && r.failures == 0, buf};
}

Outcome criterion7() {
  ExperimentSpec spec = paper_spec(ExperimentKind::kVsUsers);
  spec.sweep = {2, 3, 4, 5, 6};
  spec.configs = {{5.0, 5.0, std::nullopt}, {5.0, 10.0, std::nullopt}, {10.0, 5.0, std::nullopt}};
  const ExperimentResult r = run_logged(spec);
  bool decreasing = true, gap_shrinks = true;
  for (std::size_t c = 0; c < spec.configs.size(); ++c) {
    std::printf("  (E_th, P_t) = (%g, %g)\n", *spec.configs[c].E_th, *spec.configs[c].P_t_db);
    for (Scheme scheme : {Scheme::kNoma, Scheme::kOma}) {
      std::printf("    %-4s bits:", scheme == Scheme::kNoma ? "NOMA" : "OMA");
      for (std::size_t i = 0; i < spec.sweep.size(); ++i) {
        const double v = mean(r, c, spec.sweep[i], scheme);
        std::printf(" %.3f", v);
        if (i > 0 && !(v < mean(r, c, spec.sweep[i - 1], scheme))) decreasing = false;
      }
      std::printf("\n");
    }
    const double gap2 = mean(r, c, 2, Scheme::kNoma) - mean(r, c, 2, Scheme::kOma);
    const double gap6 = mean(r, c, 6, Scheme::kNoma) - mean(r, c, 6, Scheme::kOma);
    std::printf("    gap M=2 %.4f, gap M=6 %.4f\n", gap2, gap6);
    if (!(gap6 < gap2)) gap_shrinks = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "means decrease with M: %s, gap(M=6) < gap(M=2) for every config: %s",
                decreasing ? "yes" : "no", gap_shrinks ? "yes" : "no");
  return {decreasing && gap_shrinks && r.failures == 0, buf};
}

Outcome criterion8() {
  ExperimentSpec spec = paper_spec(ExperimentKind::kVsDelta);
  for (int i = 1; i <= 10; ++i) spec.sweep.push_back(i / 10.0);
  spec.configs = {{5.0, 5.0, 2.0}, {5.0, 5.0, 0.5}};
  const ExperimentResult r = run_logged(spec);
  bool shrinks = true;
  for (std::size_t c = 0; c < spec.configs.size(); ++c) {
    std::printf("  (E_th, P_t, D1) = (5, 5, %g)  gap:", *spec.configs[c].D1);
    for (double d : spec.sweep) std::printf(" %.4f", mean(r, c, d, Scheme::kNoma) - mean(r, c, d, Scheme::kOma));
    std::printf("\n");
    const double first = mean(r, c, 0.1, Scheme::kNoma) - mean(r, c, 0.1, Scheme::kOma);
    const double last = mean(r, c, 1.0, Scheme::kNoma) - mean(r, c, 1.0, Scheme::kOma);
    if (!(first > last)) shrinks = false;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "gap(Delta=0.1) > gap(Delta=1.0) for both configs: %s", shrinks ? "yes" : "no");
  return {shrinks && r.failures == 0, buf};
}

Outcome criterion9() {
  ExperimentSpec spec = paper_spec(ExperimentKind::kConvergence);
  spec.configs = {{15.0, 12.0, std::nullopt}};
  const ExperimentResult r = run_logged(spec);
  const PointResult* n = r.find(0, std::nan(""), Scheme::kNoma);
  const PointResult* o = r.find(0, std::nan(""), Scheme::kOma);
  double noma_iterations = 0, oma_iterations = 0;
  int wins = 0;
  const int trials = spec.trials;
  for (int t = 0; t < trials; ++t) {
    noma_iterations += n->iterations[t];
    oma_iterations += o->iterations[t];
    if (n->objective_bits[t] >= o->objective_bits[t]) ++wins;
  }
  noma_iterations /= trials;
  oma_iterations /= trials;
  std::printf("  mean bits NOMA %.4f OMA %.4f\n", n->mean_bits, o->mean_bits);
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean iterations OMA %.1f vs NOMA %.1f, NOMA >= OMA on %d/%d seeds", oma_iterations,
                noma_iterations, wins, trials);
  return {oma_iterations < noma_iterations && wins >= 0.8 * trials && r.failures == 0, buf};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"bound validity", criterion1},      {"tangency", criterion2},
      {"monotone SCA", criterion3},        {"oracle equivalence", criterion4},
      {"closed-form single user", criterion5}, {"energy sweep shape", criterion6},
      {"user sweep shape", criterion7},    {"delta sweep shape", criterion8},
      {"convergence speed", criterion9},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const Outcome o = criteria[i].second();
    std::printf("criterion %d %s: %s: %s\n", number, o.pass ? "PASS" : "FAIL", criteria[i].first, o.summary.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
