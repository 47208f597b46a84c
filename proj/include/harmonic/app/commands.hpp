#pragma once

#include "harmonic/app/config.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace harmonic::app {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_validation = 2, exit_numerical = 3 };

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing <command>.csv-style artifacts and summary.json
/// into out_dir. Exceptions are mapped to exit codes and reported on err.
int run_command(const std::string& command, const ScenarioConfig& config, const std::filesystem::path& out_dir,
                std::ostream& out, std::ostream& err);

}  // namespace harmonic::app
