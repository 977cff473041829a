#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "nomamec/channel.hpp"
#include "nomamec/experiment.hpp"
#include "nomamec/serialize.hpp"
#include "nomamec/subproblem.hpp"

namespace {

using namespace nomamec;

constexpr int kOk = 0;
constexpr int kSolveFailure = 1;
constexpr int kUsageError = 2;

// Flag, then environment, then spec file.
std::string pick_backend(const std::string& flag, const std::string& fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kBackendEnvironmentVariable); env && *env) return env;
  return fallback;
}

struct RunOptions {
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> jobs;
  std::string out;
  std::string scheme;
  std::string backend;
  bool quiet = false;
};

int run(const RunOptions& o) {
  ExperimentSpec spec = spec_from_json(read_json_file(o.spec));
  if (o.seed) spec.channel.seed = *o.seed;
  if (o.trials) spec.trials = *o.trials;
  if (o.jobs) spec.jobs = *o.jobs;
  if (!o.out.empty()) spec.output = o.out;
  if (!o.scheme.empty()) spec.scheme = parse_scheme(o.scheme);
  spec.backend = pick_backend(o.backend, spec.backend);
  spec.validate();

  const ExperimentResult result = run_experiment(spec, o.quiet ? nullptr : &std::cerr);
  if (spec.output.empty() || spec.output == "-") {
    write_csv(result, std::cout);
  } else {
    std::ofstream file(spec.output);
    if (!file) throw std::runtime_error(spec.output + ": cannot open for writing");
    write_csv(result, file);
  }
  if (result.failures > 0) {
    std::cerr << result.failures << " solve(s) failed and were excluded\n";
    return kSolveFailure;
  }
  return kOk;
}

struct SingleOptions {
  std::string scenario;
  std::string scheme = "both";
  std::string backend;
  std::string sca;
};

ScaSettings load_settings(const std::string& path) {
  return path.empty() ? ScaSettings{} : settings_from_json(read_json_file(path));
}

int single(const SingleOptions& o) {
  const Scenario scenario = scenario_from_json(read_json_file(o.scenario));
  const Scheme scheme = parse_scheme(o.scheme);
  const ScaSettings settings = load_settings(o.sca);
  auto backend = make_backend(pick_backend(o.backend, std::string(kDefaultBackend)));
  return run_single(scenario, scheme, settings, *backend, std::cout);
}

struct DrawOptions {
  std::string channel;
  std::size_t users = 4;
  std::optional<std::uint64_t> seed;
  std::uint64_t stream = 0;
};

int draw(const DrawOptions& o) {
  ChannelConfig config;
  if (!o.channel.empty()) {
    try {
      config = read_json_file(o.channel).get<ChannelConfig>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(o.channel + ": " + e.what());
    }
  }
  if (o.seed) config.seed = *o.seed;
  std::cout << scenario_to_json(draw_scenario(config, o.users, o.stream)).dump(2) << '\n';
  return kOk;
}

struct DumpOptions {
  std::string scenario;
  std::string scheme = "noma";
};

// First subproblem of the SCA loop, in solver-neutral form.
int dump(const DumpOptions& o) {
  const Scenario scenario = scenario_from_json(read_json_file(o.scenario));
  const Scheme scheme = parse_scheme(o.scheme);
  const ScaSettings settings;
  const SubproblemOptions options{settings.fixed_slot, settings.proximal_weight};
  if (scheme != Scheme::kOma) {
    const NomaAllocation start = start_point(scenario, settings.start);
    build_noma_subproblem(scenario, ExpansionPoint::from(start), options).problem.dump(std::cout);
  }
  if (scheme != Scheme::kNoma) {
    const OmaAllocation start = start_point_oma(scenario, settings.start);
    build_oma_subproblem(scenario, start, options).problem.dump(std::cout);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min fair NOMA/OMA offloading schedules via successive convex approximation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", build_identifier());

  RunOptions run_options;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment spec and write CSV");
  run_cmd->add_option("--spec", run_options.spec, "Experiment spec JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run_options.seed, "Override the channel seed");
  run_cmd->add_option("--trials", run_options.trials, "Override trials per point")->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run_options.out, "CSV path ('-' for stdout)");
  run_cmd->add_option("--scheme", run_options.scheme, "noma, oma or both");
  run_cmd->add_option("--backend", run_options.backend,
                      std::string("Solver backend (default $") + kBackendEnvironmentVariable + ", then the spec)");
  run_cmd->add_option("--jobs", run_options.jobs, "Parallel trials")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--quiet", run_options.quiet, "Do not log failed trials");

  SingleOptions single_options;
  auto* single_cmd = app.add_subcommand("single", "Solve one scenario and print the schedule");
  single_cmd->add_option("--scenario", single_options.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  single_cmd->add_option("--scheme", single_options.scheme, "noma, oma or both")->capture_default_str();
  single_cmd->add_option("--backend", single_options.backend, "Solver backend");
  single_cmd->add_option("--sca", single_options.sca, "SCA settings JSON")->check(CLI::ExistingFile);

  DrawOptions draw_options;
  auto* draw_cmd = app.add_subcommand("draw", "Draw a random scenario and print it as JSON");
  draw_cmd->add_option("--channel", draw_options.channel, "Channel config JSON")->check(CLI::ExistingFile);
  draw_cmd->add_option("--users", draw_options.users, "User count")->capture_default_str()->check(CLI::PositiveNumber);
  draw_cmd->add_option("--seed", draw_options.seed, "Override the channel seed");
  draw_cmd->add_option("--stream", draw_options.stream, "Trial stream")->capture_default_str();

  DumpOptions dump_options;
  auto* dump_cmd = app.add_subcommand("dump", "Print the first convex subproblem");
  dump_cmd->add_option("--scenario", dump_options.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  dump_cmd->add_option("--scheme", dump_options.scheme, "noma, oma or both")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*run_cmd) return run(run_options);
    if (*single_cmd) return single(single_options);
    if (*draw_cmd) return draw(draw_options);
    if (*dump_cmd) return dump(dump_options);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolveFailure;
  }
  return kUsageError;
}
