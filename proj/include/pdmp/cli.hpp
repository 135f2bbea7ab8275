#pragma once
// Batch runner behind the `pdmp` executable.
//
//   pdmp run   --config PATH [--out DIR] [--seed U64] [--threads N]
//   pdmp study --config PATH [--out DIR] [--seed U64] [--threads N]
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime error,
// 3 explosion guard tripped.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdmp/config.hpp"

namespace pdmp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitExplosion = 3;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

/// Rebuild the configuration stored under config.* keys of a metadata sidecar.
ExperimentConfig config_from_metadata(const std::map<std::string, std::string>& metadata);

std::string version_string();

}  // namespace pdmp
