#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace parctrl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNotConverged = 3;

std::vector<std::string> cli_commands();

/// Runs one command end to end: loads the config (or a manifest), writes CSVs,
/// plots and manifest.json under `out_dir`, returns the process exit code.
int run_command(const std::string& command, const std::string& config_path, const std::string& out_dir,
                std::ostream& log, std::ostream& err);

} // namespace parctrl
