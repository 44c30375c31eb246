#pragma once

#include <string>
#include <vector>

#include "symbxrl/core.hpp"
#include "symbxrl/symbolizer.hpp"

#include <nlohmann/json.hpp>

namespace symbxrl {

nlohmann::json action_to_json(const Action& action);
Action action_from_json(const nlohmann::json& j);

nlohmann::json step_to_json(const Step& step);
Step step_from_json(const nlohmann::json& j, const Schema& schema);

nlohmann::json symbolic_step_to_json(const SymbolicStep& step);
SymbolicStep symbolic_step_from_json(const nlohmann::json& j);

// JSON-lines trace files, one object per step.
std::vector<Step> read_trace(const std::string& path, const Schema& schema);
void write_trace(const std::string& path, const std::vector<Step>& steps);

SymbolicTrace read_symbolic_trace(const std::string& path);
void write_symbolic_trace(const std::string& path, const SymbolicTrace& trace);

// Write-to-temp-then-rename, so partial outputs never appear under `path`.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace symbxrl
