#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hilsim/config.hpp"
#include "hilsim/control.hpp"
#include "hilsim/experiments.hpp"
#include "hilsim/magnetics.hpp"

namespace hilsim::cli {

enum ExitCode { kOk = 0, kUsage = 1, kFailure = 2 };

magnetics::HelmholtzPair pair_from(const config::Config& cfg);
magnetics::GridSpec grid_from(const config::Config& cfg);
magnetics::UniformityMode uniformity_mode_from(const config::Config& cfg);
control::MethodParams method_params_from(const config::Config& cfg);
std::vector<control::Method> methods_from(const config::Config& cfg);
experiments::SysIdScenario sysid_from(const config::Config& cfg);
experiments::StepScenario step_from(const config::Config& cfg);

/// Full command-line entry point. Never throws; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hilsim::cli
