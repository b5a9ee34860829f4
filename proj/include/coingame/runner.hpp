#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "coingame/scenario.hpp"

namespace coingame {

struct RunReport {
  Mode mode = Mode::kLearn;
  bool success = false;
  int exit_code = 0;
  nlohmann::json machine;          // self-contained, embeds digest and seed
  std::string human;               // short text summary
  std::vector<std::string> trace;  // one JSON object per line, one per step
};

/// Dispatches on scenario.mode. Module errors (PreconditionError,
/// BudgetExceeded, ...) propagate to the caller.
RunReport run(const Scenario& scenario);

/// Report as emitted by the CLI: pretty JSON with sorted keys, newline-terminated.
std::string render_machine(const RunReport& report);

/// Trace stream: one line per step, newline-terminated.
std::string render_trace(const RunReport& report);

}  // namespace coingame
