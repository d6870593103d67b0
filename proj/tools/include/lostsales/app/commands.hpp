#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lostsales/app/config.hpp"
#include "lostsales/app/manifest.hpp"
#include "lostsales/error.hpp"

namespace lostsales::app {

enum ExitCode : int {
  kSuccess = 0,
  kVerificationFailure = 1,
  kConfigError = 2,
  kBudgetExceeded = 3,
};

/// Maps a library error code onto the process exit status.
int exit_code_for(ErrorCode code) noexcept;

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its outputs through `manifest`. Returns the
/// exit status; library errors propagate as exceptions.
int run_command(const std::string& name, const ExperimentConfig& cfg, RunManifest& manifest,
                std::ostream& log);

int cmd_constants(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_lindley(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_z_search(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_dp(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_simulate(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_lower_bound(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_gap(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_ratio_table(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);
int cmd_verify(const ExperimentConfig& cfg, RunManifest& m, std::ostream& log);

}  // namespace lostsales::app
