#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "cho/harness/config.hpp"

namespace cho::harness {

/// Exit codes: 0 success, 1 a verification check failed, 2 error (see failure.json).
int run_simulate(const RunConfig& config, std::ostream& log);
int run_optimize(const RunConfig& config, std::ostream& log);
int run_verify(const RunConfig& config, std::ostream& log);
int run_oracle_compare(const RunConfig& config, std::ostream& log);

/// Dispatches on "simulate", "optimize", "verify" or "oracle-compare". Any
/// library error is written to <out>/failure.json and turned into exit code 2.
int run_command(const std::string& command, const RunConfig& config, std::ostream& log);

/// {"status": "error", "kind", "message", "step"}; step is null unless the
/// error carries one.
void write_failure(const std::filesystem::path& dir, const std::string& kind, const std::string& message,
                   std::optional<int> step = std::nullopt);

/// t,mean,energy,min_phi,max_phi,grad_mu
[[nodiscard]] std::string diagnostics_csv(const state::StateTrajectory& traj);

/// Forward run of the configured problem with its initial control.
[[nodiscard]] state::StateTrajectory simulate_config(const RunConfig& config);
[[nodiscard]] control::ControlProblem control_problem(const RunConfig& config);

}  // namespace cho::harness
