#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>

#include "trapwave_cli/bundle.hpp"
#include "trapwave_cli/config.hpp"

namespace trapwave::cli {

struct RunOptions {
  std::string subcommand;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  // Progress lines ("stage: ..."); may be empty.
  std::function<void(const std::string&)> log;
};

// Runs the requested stages. SolverFailure propagates with the failing stage
// in its message; scientific check failures are collected in
// bundle.failures.
ResultBundle run_pipeline(const Config& config, const RunOptions& opts);

// ISO-8601 UTC; SOURCE_DATE_EPOCH wins over the clock when set.
std::string build_timestamp();

}  // namespace trapwave::cli
