#pragma once

#include <string>
#include <vector>

#include "edgeprov/sim.hpp"

namespace edgeprov {

/// Named device/workload presets usable from configuration files and the CLI.
std::vector<std::string> preset_names();

/// A one-paragraph description of the preset.
std::string preset_description(const std::string& name);

/// A complete SimConfig seeded with the preset's devices, services, channel
/// and request profile. Throws ConfigError for unknown names.
SimConfig preset_config(const std::string& name);

}  // namespace edgeprov
