#pragma once

// Scenario pipeline: simulate, build the interpreted system, check the
// task conditions and formulas, compare against the hybrid model, and
// render line-oriented reports.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "lumi/scenario.hpp"

namespace lumi {

enum class Command : std::uint8_t { Run, Simulate, Check, FrameStats, Equiv };
const char* command_name(Command c);

inline constexpr int kExitPass = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitFalse = 2;
inline constexpr int kExitUnknown = 3;

/// FALSE takes precedence over UNKNOWN.
int exit_code_for(bool any_false, bool any_unknown);

struct PipelineOptions {
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> cap;
  std::size_t jobs = 1;
  std::uint64_t seed = 0;  // reserved
  std::string formula;     // Command::Check only
  std::size_t max_witnesses = 4;
};

struct PipelineResult {
  int exit_code = kExitPass;
  // Report name -> body; text bodies carry no header line.
  std::map<std::string, std::string> reports;
};

/// Applies command-line overrides to a loaded scenario.
Scenario with_overrides(Scenario scenario, const PipelineOptions& options);

/// Throws InputError, ModelError or CapExceeded on bad input or blown caps.
PipelineResult run_pipeline(const Scenario& scenario, Command command,
                            const PipelineOptions& options);

/// Writes every report into `dir`, prefixing text reports with `header`.
void write_reports(const PipelineResult& result, const std::string& dir,
                   const std::string& header);

/// Body without the first line, used for golden comparisons.
std::string strip_header(const std::string& text);

}  // namespace lumi
