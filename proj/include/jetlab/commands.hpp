#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "jetlab/config.hpp"

namespace jetlab {

struct CommandOverrides {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

// Each command writes its artifacts into out_dir and returns the process
// exit code: 0 success, 1 quantitative failure, 2 is reserved for input
// errors and produced by the dispatcher via exceptions.
int run_verify(const RunConfig& cfg, const std::string& out_dir,
               const CommandOverrides& ov);
int run_analyze(const RunConfig& cfg, const std::string& out_dir,
                const CommandOverrides& ov);
int run_solve(const RunConfig& cfg, const std::string& out_dir);
int run_reduce(const RunConfig& cfg, const std::string& out_dir);

}  // namespace jetlab
