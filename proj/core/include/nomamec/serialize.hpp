#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "nomamec/model.hpp"
#include "nomamec/sca.hpp"

namespace nomamec {

/// Malformed or invalid input document. what() starts with
/// "<source>:<line>:<column>: " when the position is known.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws InputError on I/O or syntax errors.
nlohmann::json parse_json(const std::string& text, const std::string& source = "<input>");
nlohmann::json read_json_file(const std::filesystem::path& path);

/// {"gains": [...], "deadlines": [...], "E_th": joules, "P_t": watts}
nlohmann::json scenario_to_json(const Scenario& scenario);
/// Throws InputError for missing fields or violated invariants.
Scenario scenario_from_json(const nlohmann::json& j);

/// {"powers": [[P00], [P10, P11], ...], "extensions": [...]}
nlohmann::json allocation_to_json(const NomaAllocation& alloc);
/// {"powers": [...], "slots": [...]}
nlohmann::json allocation_to_json(const OmaAllocation& alloc);
nlohmann::json report_to_json(const FeasibilityReport& report);

/// Keys: max_iterations, rel_tolerance, abs_tolerance, proximal_weight,
/// fixed_slot ("log_ratio" | "full_surrogate"), start ("deadline_gaps" | "zero").
nlohmann::json settings_to_json(const ScaSettings& settings);
ScaSettings settings_from_json(const nlohmann::json& j);

}  // namespace nomamec
