#include "nomamec/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "nomamec/serialize.hpp"

#ifndef NOMAMEC_VERSION
#define NOMAMEC_VERSION "unknown"
#endif

namespace nomamec {
namespace {

using nlohmann::json;

constexpr double kNoSweep = std::numeric_limits<double>::quiet_NaN();

bool has_sweep(ExperimentKind kind) {
  return kind == ExperimentKind::kVsEnergy || kind == ExperimentKind::kVsUsers ||
         kind == ExperimentKind::kVsDelta;
}

std::string number(double x) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.12g", x);
  return buffer;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string quoted = "\"";
  for (char c : text) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

void csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out << ',';
    out << csv_field(f);
    first = false;
  }
  out << '\n';
}

struct Point {
  std::size_t config;
  double sweep_value;
  std::size_t users;
  ChannelConfig channel;
};

std::vector<Point> expand(const ExperimentSpec& spec) {
  std::vector<SweepConfig> configs = spec.configs;
  if (configs.empty()) configs.emplace_back();
  const std::vector<double> sweep = has_sweep(spec.kind) ? spec.sweep : std::vector<double>{kNoSweep};
  std::vector<Point> points;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    for (double v : sweep) {
      Point p{c, v, spec.users, spec.channel};
      if (configs[c].E_th) p.channel.E_th = *configs[c].E_th;
      if (configs[c].P_t_db) p.channel.P_t_db = *configs[c].P_t_db;
      if (configs[c].D1) p.channel.D1 = *configs[c].D1;
      switch (spec.kind) {
        case ExperimentKind::kVsEnergy: p.channel.E_th = v; break;
        case ExperimentKind::kVsUsers: p.users = static_cast<std::size_t>(v); break;
        case ExperimentKind::kVsDelta: p.channel.Delta = v; break;
        default: break;
      }
      points.push_back(p);
    }
  }
  return points;
}

struct TrialOutcome {
  double objective_bits = kNoSweep;
  int iterations = 0;
  Termination termination = Termination::kIterationLimit;
  std::vector<double> trajectory_bits;
  std::string failure;
};

template <typename Report>
TrialOutcome outcome(const Report& report) {
  TrialOutcome o;
  o.iterations = report.iterations;
  o.termination = report.termination;
  o.failure = report.failure;
  if (report.termination != Termination::kSolverFailure) o.objective_bits = nats_to_bits(report.objective());
  for (double v : report.trajectory) o.trajectory_bits.push_back(nats_to_bits(v));
  return o;
}

std::vector<Scheme> schemes(Scheme s) {
  if (s == Scheme::kBoth) return {Scheme::kNoma, Scheme::kOma};
  return {s};
}

void summarize(PointResult& r, const std::vector<const TrialOutcome*>& trials) {
  double sum = 0.0;
  std::size_t longest = 0;
  for (const TrialOutcome* t : trials) {
    r.objective_bits.push_back(t->objective_bits);
    r.iterations.push_back(t->iterations);
    r.termination.push_back(t->termination);
    if (t->termination == Termination::kSolverFailure) {
      ++r.failed;
      continue;
    }
    ++r.succeeded;
    sum += t->objective_bits;
    longest = std::max(longest, t->trajectory_bits.size());
  }
  if (r.succeeded == 0) {
    r.mean_bits = r.stderr_bits = kNoSweep;
    return;
  }
  r.mean_bits = sum / r.succeeded;
  double squares = 0.0;
  for (const TrialOutcome* t : trials)
    if (t->termination != Termination::kSolverFailure)
      squares += (t->objective_bits - r.mean_bits) * (t->objective_bits - r.mean_bits);
  r.stderr_bits = r.succeeded > 1 ? std::sqrt(squares / (r.succeeded - 1) / r.succeeded) : 0.0;

  r.mean_trajectory_bits.assign(longest, 0.0);
  for (const TrialOutcome* t : trials) {
    if (t->termination == Termination::kSolverFailure) continue;
    for (std::size_t n = 0; n < longest; ++n)
      r.mean_trajectory_bits[n] += t->trajectory_bits[std::min(n, t->trajectory_bits.size() - 1)];
  }
  for (double& v : r.mean_trajectory_bits) v /= r.succeeded;
}

SweepConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InputError("configs entries must be objects");
  SweepConfig c;
  for (const auto& item : j.items()) {
    const double v = item.value().get<double>();
    if (item.key() == "E_th") c.E_th = v;
    else if (item.key() == "P_t_db") c.P_t_db = v;
    else if (item.key() == "D1") c.D1 = v;
    else throw InputError("configs: unknown field '" + item.key() + "'");
  }
  return c;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kVsEnergy: return "vs_energy";
    case ExperimentKind::kVsUsers: return "vs_users";
    case ExperimentKind::kVsDelta: return "vs_delta";
    case ExperimentKind::kSingle: return "single";
  }
  return "?";
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kNoma: return "noma";
    case Scheme::kOma: return "oma";
    case Scheme::kBoth: return "both";
  }
  return "?";
}

ExperimentKind parse_kind(std::string_view text) {
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kVsEnergy, ExperimentKind::kVsUsers,
                 ExperimentKind::kVsDelta, ExperimentKind::kSingle})
    if (to_string(k) == text) return k;
  throw std::invalid_argument("unknown experiment kind '" + std::string(text) + "'");
}

Scheme parse_scheme(std::string_view text) {
  for (auto s : {Scheme::kNoma, Scheme::kOma, Scheme::kBoth})
    if (to_string(s) == text) return s;
  throw std::invalid_argument("unknown scheme '" + std::string(text) + "' (noma, oma or both)");
}

void ExperimentSpec::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("experiment spec: " + what); };
  if (has_sweep(kind) && sweep.empty()) fail("sweep must be nonempty for " + std::string(to_string(kind)));
  if (trials < 1) fail("trials must be at least 1");
  if (jobs < 1) fail("jobs must be at least 1");
  sca.validate();
  std::size_t most_users = users;
  if (kind == ExperimentKind::kVsUsers) {
    most_users = 1;
    for (double v : sweep) {
      if (!(v >= 1.0) || v != std::floor(v)) fail("user counts must be positive integers");
      most_users = std::max(most_users, static_cast<std::size_t>(v));
    }
  }
  if (most_users == 0) fail("users must be positive");
  for (const Point& p : expand(*this)) p.channel.validate(kind == ExperimentKind::kVsUsers ? most_users : p.users);
}

ExperimentSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw InputError("experiment spec must be a JSON object");
  ExperimentSpec s;
  try {
    for (const auto& item : j.items()) {
      const std::string& key = item.key();
      const json& v = item.value();
      if (key == "kind") s.kind = parse_kind(v.get<std::string>());
      else if (key == "sweep") s.sweep = v.get<std::vector<double>>();
      else if (key == "configs") {
        for (const json& c : v) s.configs.push_back(config_from_json(c));
      } else if (key == "users") s.users = v.get<std::size_t>();
      else if (key == "trials") s.trials = v.get<int>();
      else if (key == "channel") s.channel = v.get<ChannelConfig>();
      else if (key == "sca") s.sca = settings_from_json(v);
      else if (key == "scheme") s.scheme = parse_scheme(v.get<std::string>());
      else if (key == "backend") s.backend = v.get<std::string>();
      else if (key == "output") s.output = v.get<std::string>();
      else if (key == "jobs") s.jobs = v.get<int>();
      else throw InputError("experiment spec: unknown field '" + key + "'");
    }
    s.validate();
  } catch (const json::exception& e) {
    throw InputError(std::string("experiment spec: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return s;
}

json spec_to_json(const ExperimentSpec& s) {
  json configs = json::array();
  for (const SweepConfig& c : s.configs) {
    json o = json::object();
    if (c.E_th) o["E_th"] = *c.E_th;
    if (c.P_t_db) o["P_t_db"] = *c.P_t_db;
    if (c.D1) o["D1"] = *c.D1;
    configs.push_back(o);
  }
  return {{"kind", to_string(s.kind)}, {"sweep", s.sweep},     {"configs", configs},
          {"users", s.users},          {"trials", s.trials},   {"channel", s.channel},
          {"sca", settings_to_json(s.sca)},
          {"scheme", to_string(s.scheme)}, {"backend", s.backend}, {"output", s.output},
          {"jobs", s.jobs}};
}

const PointResult* ExperimentResult::find(std::size_t config, double sweep_value, Scheme scheme) const {
  for (const PointResult& p : points) {
    const bool same_value = (std::isnan(sweep_value) && std::isnan(p.sweep_value)) || p.sweep_value == sweep_value;
    if (p.config == config && same_value && p.scheme == scheme) return &p;
  }
  return nullptr;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* log) {
  spec.validate();
  make_backend(spec.backend, spec.backend_settings);  // rejects unknown names up front
  const std::vector<Point> points = expand(spec);
  const std::vector<Scheme> run = schemes(spec.scheme);
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t tasks = points.size() * trials;

  // outcomes[task * run.size() + scheme]
  std::vector<TrialOutcome> outcomes(tasks * run.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    try {
      auto backend = make_backend(spec.backend, spec.backend_settings);
      ScaSettings settings = spec.sca;
      settings.keep_history = false;
      for (std::size_t task; (task = next++) < tasks;) {
        const Point& p = points[task / trials];
        const std::size_t trial = task % trials;
        const Scenario scenario = draw_scenario(p.channel, p.users, static_cast<std::uint64_t>(trial));
        for (std::size_t k = 0; k < run.size(); ++k) {
          TrialOutcome& o = outcomes[task * run.size() + k];
          o = run[k] == Scheme::kNoma ? outcome(solve_noma(scenario, settings, *backend))
                                      : outcome(solve_oma(scenario, settings, *backend));
          if (o.termination == Termination::kSolverFailure && log) {
            std::lock_guard lock(log_mutex);
            *log << "trial " << trial << " (" << to_string(run[k]) << ", M=" << p.users
                 << ", E_th=" << p.channel.E_th << ", P_t_db=" << p.channel.P_t_db
                 << ", Delta=" << p.channel.Delta << "): solver failure: " << o.failure << '\n';
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(log_mutex);
      if (!error) error = std::current_exception();
      next = tasks;
    }
  };
  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), tasks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  ExperimentResult result{spec, {}, 0};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    for (std::size_t k = 0; k < run.size(); ++k) {
      PointResult r;
      r.config = p.config;
      r.sweep_value = p.sweep_value;
      r.users = p.users;
      r.E_th = p.channel.E_th;
      r.P_t_db = p.channel.P_t_db;
      r.D1 = p.channel.D1;
      r.Delta = p.channel.Delta;
      r.scheme = run[k];
      std::vector<const TrialOutcome*> trial_outcomes;
      for (std::size_t t = 0; t < trials; ++t) trial_outcomes.push_back(&outcomes[(i * trials + t) * run.size() + k]);
      summarize(r, trial_outcomes);
      result.failures += r.failed;
      result.points.push_back(std::move(r));
    }
  }
  return result;
}

std::string build_identifier() {
  std::string id = "nomamec " NOMAMEC_VERSION;
#ifdef __VERSION__
  id += " (" __VERSION__ ")";
#endif
#ifdef NDEBUG
  id += " release";
#else
  id += " debug";
#endif
  return id;
}

void write_csv(const ExperimentResult& result, std::ostream& out) {
  const ExperimentSpec& s = result.spec;
  auto meta = [&](const std::string& key, const std::string& value) { out << "# " << key << ',' << csv_field(value) << '\n'; };
  meta("kind", std::string(to_string(s.kind)));
  meta("seed", std::to_string(s.channel.seed));
  meta("rng", std::string(kRngName));
  meta("trials", std::to_string(s.trials));
  meta("users", std::to_string(s.users));
  meta("backend", s.backend);
  meta("backend_tolerances", number(s.backend_settings.feasibility_tolerance) + " " +
                                 number(s.backend_settings.absolute_gap_tolerance) + " " +
                                 number(s.backend_settings.relative_gap_tolerance));
  meta("sca", settings_to_json(s.sca).dump());
  meta("channel", json(s.channel).dump());
  meta("build", build_identifier());
  meta("failures", std::to_string(result.failures));

  auto scheme = [](const PointResult& p) { return std::string(to_string(p.scheme)); };
  switch (s.kind) {
    case ExperimentKind::kConvergence:
      csv_row(out, {"iteration", "scheme", "E_th", "P_t_db", "objective_bits", "trials", "failed"});
      for (const PointResult& p : result.points)
        for (std::size_t n = 0; n < p.mean_trajectory_bits.size(); ++n)
          csv_row(out, {std::to_string(n), scheme(p), number(p.E_th), number(p.P_t_db),
                        number(p.mean_trajectory_bits[n]), std::to_string(p.succeeded), std::to_string(p.failed)});
      break;
    case ExperimentKind::kVsEnergy:
      csv_row(out, {"E_th", "P_t_db", "scheme", "mean_bits", "stderr_bits", "trials", "failed"});
      for (const PointResult& p : result.points)
        csv_row(out, {number(p.E_th), number(p.P_t_db), scheme(p), number(p.mean_bits), number(p.stderr_bits),
                      std::to_string(p.succeeded), std::to_string(p.failed)});
      break;
    case ExperimentKind::kVsUsers:
      csv_row(out, {"M", "E_th", "P_t_db", "scheme", "mean_bits", "stderr_bits", "trials", "failed"});
      for (const PointResult& p : result.points)
        csv_row(out, {std::to_string(p.users), number(p.E_th), number(p.P_t_db), scheme(p), number(p.mean_bits),
                      number(p.stderr_bits), std::to_string(p.succeeded), std::to_string(p.failed)});
      break;
    case ExperimentKind::kVsDelta:
      csv_row(out, {"Delta", "E_th", "P_t_db", "D1", "scheme", "mean_bits", "stderr_bits", "trials", "failed"});
      for (const PointResult& p : result.points)
        csv_row(out, {number(p.Delta), number(p.E_th), number(p.P_t_db), number(p.D1), scheme(p),
                      number(p.mean_bits), number(p.stderr_bits), std::to_string(p.succeeded),
                      std::to_string(p.failed)});
      break;
    case ExperimentKind::kSingle:
      csv_row(out, {"trial", "M", "E_th", "P_t_db", "scheme", "objective_bits", "iterations", "termination"});
      for (const PointResult& p : result.points)
        for (std::size_t t = 0; t < p.objective_bits.size(); ++t)
          csv_row(out, {std::to_string(t), std::to_string(p.users), number(p.E_th), number(p.P_t_db), scheme(p),
                        number(p.objective_bits[t]), std::to_string(p.iterations[t]),
                        std::string(to_string(p.termination[t]))});
      break;
  }
  if (!out) throw std::runtime_error("failed to write CSV output");
}

namespace {

void print_report(const FeasibilityReport& r, std::ostream& out) {
  out << "  energy slack   " << number(r.energy_slack) << " J\n";
  out << "  deadline slack";
  for (double v : r.deadline_slack) out << ' ' << number(v);
  out << " s\n  power slack   ";
  for (double v : r.power_slack) out << ' ' << number(v);
  out << " W\n  feasible       " << (r.feasible ? "yes" : "no") << " (tolerance " << number(r.tolerance) << ")\n";
}

template <typename Report, typename Offload, typename Audit>
int finish_single(const char* label, const Report& report, const Scenario& scenario, Offload offload,
                  Audit audit, std::ostream& out) {
  const FeasibilityReport feas = audit(report.allocation, scenario, kDefaultFeasibilityTolerance);
  out << label << ": " << to_string(report.termination) << " after " << report.iterations << " iterations\n";
  if (!report.failure.empty()) out << "  failure: " << report.failure << '\n';
  for (std::size_t m = 0; m < scenario.user_count(); ++m)
    out << "  user " << m << "  " << number(nats_to_bits(offload(report.allocation, scenario, m))) << " bits\n";
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < scenario.user_count(); ++m) worst = std::min(worst, offload(report.allocation, scenario, m));
  out << "  min            " << number(nats_to_bits(worst)) << " bits\n";
  out << "  surrogate min  " << number(nats_to_bits(report.objective())) << " bits\n";
  print_report(feas, out);
  out << "  allocation " << allocation_to_json(report.allocation).dump() << '\n';
  return report.termination != Termination::kSolverFailure && feas.feasible ? 0 : 1;
}

}  // namespace

int run_single(const Scenario& scenario, Scheme scheme, const ScaSettings& settings, SolverBackend& backend,
               std::ostream& out) {
  int status = 0;
  if (scheme != Scheme::kOma) {
    const NomaReport r = solve_noma(scenario, settings, backend);
    status = std::max(status, finish_single("noma", r, scenario,
                                            [](const auto& a, const auto& s, std::size_t m) { return offloaded_nats(a, s, m); },
                                            [](const auto& a, const auto& s, double t) { return audit_noma(a, s, t); }, out));
  }
  if (scheme != Scheme::kNoma) {
    const OmaReport r = solve_oma(scenario, settings, backend);
    status = std::max(status, finish_single("oma", r, scenario,
                                            [](const auto& a, const auto& s, std::size_t m) { return offloaded_nats_oma(a, s, m); },
                                            [](const auto& a, const auto& s, double t) { return audit_oma(a, s, t); }, out));
  }
  return status;
}

}  // namespace nomamec
