#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "table.hpp"

namespace sqcli {

const std::vector<std::string> &command_names();

// Validates the configuration for `command` (ConfigError on failure), then
// evaluates every sweep point on up to `parallel` threads. Row order is fixed
// by the configuration alone.
Table run_command(const std::string &command, const Config &cfg, int parallel);

} // namespace sqcli
