#pragma once

#include <ostream>
#include <string>

#include "advmask/experiment_config.hpp"

namespace advmask {

/// Experiment orchestration behind the CLI. Each command reads its section
/// of the config, writes fixed-name outputs plus a config snapshot under
/// out_dir, and returns 0. Failures are thrown as Error.
int cmd_train(const ExperimentConfig& config, std::ostream& log);
int cmd_eval(const ExperimentConfig& config, std::ostream& log);
int cmd_transfer(const ExperimentConfig& config, std::ostream& log);
int cmd_calibrate(const ExperimentConfig& config, std::ostream& log);
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);
int cmd_defend(const ExperimentConfig& config, std::ostream& log);
int cmd_report(const ExperimentConfig& config, std::ostream& log);
int cmd_fetch(const ExperimentConfig& config, std::ostream& log);

/// Dispatches by command name and maps exceptions onto the exit-code
/// contract (0 ok, 1 internal, 2 bad input/asset), emitting one machine
/// readable error JSON line to `err` on failure.
int run_command(const std::string& name, const ExperimentConfig& config, std::ostream& log,
                std::ostream& err);

/// Loads a checkpoint directory (mask.png + mask.support.png).
MaskTexture load_checkpoint(const std::string& checkpoint_dir);

}  // namespace advmask
