// Subcommands of the dfrc tool. Each returns the process exit code:
// 0 success, 1 configuration or I/O error, 2 no feasible starting point.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dfrc/config.hpp"

namespace dfrc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitInfeasible = 2;

/// "power-mean:p=-20", "quasi-arithmetic:generator=exp-mean,a=0.5",
/// "detection-prob:pfa=1e-4" and so on; values that parse as numbers become numbers.
Json parse_merit_flag(const std::string& flag);

struct SolveArgs {
  std::filesystem::path config;
  std::optional<std::string> merit;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
};

int cmd_solve(const SolveArgs& args);

struct SweepArgs {
  std::filesystem::path spec;
  std::filesystem::path out = "out";
  int jobs = 0;  // 0: hardware concurrency
};

int cmd_sweep(const SweepArgs& args);

int cmd_validate(const std::filesystem::path& config);

}  // namespace dfrc
