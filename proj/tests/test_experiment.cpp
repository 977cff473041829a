#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "nomamec/experiment.hpp"
#include "nomamec/serialize.hpp"

namespace {

using namespace nomamec;
using nlohmann::json;

ExperimentSpec small_energy_spec() {
  return spec_from_json(json::parse(R"({
    "kind": "vs_energy", "sweep": [2, 6], "configs": [{"P_t_db": 5}],
    "users": 2, "trials": 3, "channel": {"seed": 17}
  })"));
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

TEST(Spec, ParsesAndValidates) {
  const ExperimentSpec s = small_energy_spec();
  EXPECT_EQ(s.kind, ExperimentKind::kVsEnergy);
  EXPECT_EQ(s.trials, 3);
  EXPECT_EQ(s.channel.seed, 17u);
  EXPECT_EQ(*s.configs[0].P_t_db, 5.0);
  EXPECT_EQ(spec_from_json(spec_to_json(s)).sweep, s.sweep);

  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "vs_energy"})")), InputError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "vs_users", "sweep": [2.5]})")), InputError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "single", "trials": 0})")), InputError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "single", "bogus": 1})")), InputError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "sideways"})")), InputError);
  EXPECT_THROW(spec_from_json(json::parse(R"({"kind": "single", "configs": [{"Pt": 1}]})")), InputError);
}

TEST(Spec, SchemeAndKindNames) {
  EXPECT_EQ(parse_scheme("oma"), Scheme::kOma);
  EXPECT_THROW(parse_scheme("tdma"), std::invalid_argument);
  EXPECT_EQ(parse_kind("vs_delta"), ExperimentKind::kVsDelta);
}

TEST(Experiment, EnergySweepCsv) {
  const ExperimentResult r = run_experiment(small_energy_spec());
  EXPECT_EQ(r.failures, 0);
  ASSERT_EQ(r.points.size(), 4u);
  for (const PointResult& p : r.points) {
    EXPECT_EQ(p.succeeded, 3);
    EXPECT_GE(p.mean_bits, 0.0);
  }
  const PointResult* low = r.find(0, 2, Scheme::kNoma);
  const PointResult* high = r.find(0, 6, Scheme::kNoma);
  ASSERT_TRUE(low && high);
  EXPECT_GE(high->mean_bits, low->mean_bits - 1e-6);

  std::ostringstream out;
  write_csv(r, out);
  const std::string csv = out.str();
  EXPECT_NE(csv.find("# seed,17"), std::string::npos);
  EXPECT_NE(csv.find("# rng,mt19937_64/splitmix64"), std::string::npos);
  EXPECT_NE(csv.find("# build,"), std::string::npos);
  const auto lines = data_lines(csv);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], "E_th,P_t_db,scheme,mean_bits,stderr_bits,trials,failed");
  EXPECT_EQ(lines[1].substr(0, 11), "2,5,noma,0.");
}

TEST(Experiment, ReproducibleAndJobIndependent) {
  ExperimentSpec s = small_energy_spec();
  std::ostringstream a, b;
  write_csv(run_experiment(s), a);
  s.jobs = 3;
  write_csv(run_experiment(s), b);
  EXPECT_EQ(data_lines(a.str()), data_lines(b.str()));
}

TEST(Experiment, SingleUserRunMatchesClosedForm) {
  const ExperimentSpec s = spec_from_json(json::parse(R"({
    "kind": "single", "users": 1, "trials": 4, "channel": {"E_th": 3, "P_t_db": 3, "seed": 2}
  })"));
  const ExperimentResult r = run_experiment(s);
  const PointResult* p = r.find(0, std::nan(""), Scheme::kNoma);
  ASSERT_TRUE(p);
  for (std::size_t t = 0; t < 4; ++t) {
    const Scenario sc = draw_scenario(s.channel, 1, t);
    const double D = sc.deadline(0);
    const double closed = D * std::log1p(sc.gain(0) * std::min(sc.power_budget(), sc.energy_budget() / D));
    EXPECT_NEAR(p->objective_bits[t], nats_to_bits(closed), 1e-3);
  }
  std::ostringstream out;
  write_csv(r, out);
  const auto lines = data_lines(out.str());
  EXPECT_EQ(lines[0], "trial,M,E_th,P_t_db,scheme,objective_bits,iterations,termination");
  EXPECT_EQ(lines.size(), 9u);
}

TEST(Experiment, UsersAndDeltaAndConvergence) {
  const ExperimentResult users = run_experiment(spec_from_json(json::parse(R"({
    "kind": "vs_users", "sweep": [1, 2], "configs": [{"E_th": 5, "P_t_db": 5}], "trials": 2, "scheme": "oma"
  })")));
  ASSERT_EQ(users.points.size(), 2u);
  EXPECT_EQ(users.points[1].users, 2u);
  EXPECT_EQ(users.points[0].scheme, Scheme::kOma);

  const ExperimentResult delta = run_experiment(spec_from_json(json::parse(R"({
    "kind": "vs_delta", "sweep": [0.1, 1.0], "configs": [{"E_th": 5, "P_t_db": 5, "D1": 0.5}], "users": 2, "trials": 2
  })")));
  ASSERT_EQ(delta.points.size(), 4u);
  EXPECT_EQ(delta.points[0].D1, 0.5);
  EXPECT_EQ(delta.points[2].Delta, 1.0);
  std::ostringstream out;
  write_csv(delta, out);
  EXPECT_EQ(data_lines(out.str())[0], "Delta,E_th,P_t_db,D1,scheme,mean_bits,stderr_bits,trials,failed");

  const ExperimentResult conv = run_experiment(spec_from_json(json::parse(R"({
    "kind": "convergence", "configs": [{"E_th": 15, "P_t_db": 12}], "users": 2, "trials": 2
  })")));
  ASSERT_EQ(conv.points.size(), 2u);
  const auto& traj = conv.points[0].mean_trajectory_bits;
  ASSERT_GE(traj.size(), 2u);
  for (std::size_t n = 1; n < traj.size(); ++n) EXPECT_GE(traj[n], traj[n - 1] - 1e-7);
  EXPECT_NEAR(traj.back(), conv.points[0].mean_bits, 1e-9);
  std::ostringstream cout_;
  write_csv(conv, cout_);
  EXPECT_EQ(data_lines(cout_.str())[0], "iteration,scheme,E_th,P_t_db,objective_bits,trials,failed");
}

TEST(Experiment, UnknownBackendIsRejected) {
  ExperimentSpec s = small_energy_spec();
  s.backend = "nope";
  EXPECT_THROW(run_experiment(s), std::invalid_argument);
}

TEST(RunSingle, ZeroEnergySchedule) {
  const Scenario s({1.0, 0.5}, {1, 2}, 0, 2);
  auto backend = make_backend();
  std::ostringstream out;
  EXPECT_EQ(run_single(s, Scheme::kBoth, {}, *backend, out), 0);
  EXPECT_NE(out.str().find("noma: converged"), std::string::npos);
  EXPECT_NE(out.str().find("oma: converged"), std::string::npos);
  EXPECT_NE(out.str().find("feasible       yes"), std::string::npos);
}

TEST(Serialize, ScenarioRoundTripAndErrors) {
  const Scenario s({1.0, 0.5}, {1, 2}, 4, 2);
  const Scenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(back.gain(1), 0.5);
  EXPECT_EQ(back.power_budget(), 2.0);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"gains": [1]})")), InputError);
  EXPECT_THROW(scenario_from_json(json::parse(R"({"gains": [1, 1], "deadlines": [2, 1], "E_th": 1, "P_t": 1})")),
               InputError);
  try {
    parse_json("{\n  \"gains\": [1,\n}", "s.json");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_EQ(std::string(e.what()).rfind("s.json:3:", 0), 0u) << e.what();
  }
}

TEST(Serialize, Settings) {
  ScaSettings s;
  s.proximal_weight = 0.5;
  s.start = StartPoint::kZero;
  const ScaSettings back = settings_from_json(settings_to_json(s));
  EXPECT_EQ(*back.proximal_weight, 0.5);
  EXPECT_EQ(back.start, StartPoint::kZero);
  EXPECT_THROW(settings_from_json(json::parse(R"({"start": "random"})")), InputError);
  EXPECT_THROW(settings_from_json(json::parse(R"({"max_iterations": 0})")), InputError);
}

}  // namespace
