#include "nomamec/serialize.hpp"

#include <fstream>
#include <sstream>

namespace nomamec {
namespace {

using nlohmann::json;

std::string position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return std::to_string(line) + ":" + std::to_string(column);
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InputError(std::string(what) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw InputError(std::string(what) + ": unknown field '" + item.key() + "'");
  }
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::string message = e.what();
    if (const auto at = message.find("] "); at != std::string::npos) message = message.substr(at + 2);
    throw InputError(source + ":" + position(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + message);
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_json(buffer.str(), path.string());
}

json scenario_to_json(const Scenario& s) {
  return {{"gains", std::vector<double>(s.gains().begin(), s.gains().end())},
          {"deadlines", std::vector<double>(s.deadlines().begin(), s.deadlines().end())},
          {"E_th", s.energy_budget()},
          {"P_t", s.power_budget()}};
}

Scenario scenario_from_json(const json& j) {
  reject_unknown(j, {"gains", "deadlines", "E_th", "P_t"}, "scenario");
  auto gains = required<std::vector<double>>(j, "gains");
  auto deadlines = required<std::vector<double>>(j, "deadlines");
  const double energy = required<double>(j, "E_th");
  const double power = required<double>(j, "P_t");
  try {
    return Scenario(std::move(gains), std::move(deadlines), energy, power);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("scenario: ") + e.what());
  }
}

json allocation_to_json(const NomaAllocation& a) {
  json powers = json::array();
  for (std::size_t m = 0; m < a.user_count(); ++m) {
    json row = json::array();
    for (std::size_t j = 0; j <= m; ++j) row.push_back(a.power(m, j));
    powers.push_back(row);
  }
  return {{"powers", powers},
          {"extensions", std::vector<double>(a.extensions().begin(), a.extensions().end())}};
}

json allocation_to_json(const OmaAllocation& a) {
  return {{"powers", std::vector<double>(a.powers().begin(), a.powers().end())},
          {"slots", std::vector<double>(a.slots().begin(), a.slots().end())}};
}

json report_to_json(const FeasibilityReport& r) {
  return {{"energy_slack", r.energy_slack},
          {"deadline_slack", r.deadline_slack},
          {"power_slack", r.power_slack},
          {"tolerance", r.tolerance},
          {"feasible", r.feasible}};
}

json settings_to_json(const ScaSettings& s) {
  json j = {{"max_iterations", s.max_iterations},
            {"rel_tolerance", s.rel_tolerance},
            {"abs_tolerance", s.abs_tolerance},
            {"fixed_slot", s.fixed_slot == FixedSlotBound::kLogRatio ? "log_ratio" : "full_surrogate"},
            {"start", s.start == StartPoint::kDeadlineGaps ? "deadline_gaps" : "zero"}};
  j["proximal_weight"] = s.proximal_weight ? json(*s.proximal_weight) : json(nullptr);
  return j;
}

ScaSettings settings_from_json(const json& j) {
  reject_unknown(j,
                 {"max_iterations", "rel_tolerance", "abs_tolerance", "proximal_weight", "fixed_slot",
                  "start"},
                 "sca settings");
  ScaSettings s;
  try {
    s.max_iterations = j.value("max_iterations", s.max_iterations);
    s.rel_tolerance = j.value("rel_tolerance", s.rel_tolerance);
    s.abs_tolerance = j.value("abs_tolerance", s.abs_tolerance);
    if (j.contains("proximal_weight") && !j["proximal_weight"].is_null())
      s.proximal_weight = j["proximal_weight"].get<double>();
    const std::string slot = j.value("fixed_slot", std::string("log_ratio"));
    if (slot == "log_ratio") s.fixed_slot = FixedSlotBound::kLogRatio;
    else if (slot == "full_surrogate") s.fixed_slot = FixedSlotBound::kFullSurrogate;
    else throw InputError("sca settings: unknown fixed_slot '" + slot + "'");
    const std::string start = j.value("start", std::string("deadline_gaps"));
    if (start == "deadline_gaps") s.start = StartPoint::kDeadlineGaps;
    else if (start == "zero") s.start = StartPoint::kZero;
    else throw InputError("sca settings: unknown start '" + start + "'");
    s.validate();
  } catch (const json::exception& e) {
    throw InputError(std::string("sca settings: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("sca settings: ") + e.what());
  }
  return s;
}

}  // namespace nomamec
