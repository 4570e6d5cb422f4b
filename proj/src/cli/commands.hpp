#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace gibbs::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitAssertion = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitDivergence = 4;

/// Version of every CSV layout written by the commands; recorded in run.json.
inline constexpr const char* kSchemaVersion = "gibbslab-csv/1";

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
};

const std::vector<std::string>& command_names();

/// Runs one command and returns its exit status. Diagnostics go to `log`.
/// Flags override the matching config keys (seed, out, workers).
int run(const Options& opts, std::ostream& log);

/// Same, with an already parsed config.
int run(const std::string& command, Config cfg, std::ostream& log);

}  // namespace gibbs::cli
