#pragma once

#include "config.hpp"
#include "render.hpp"

namespace weakflow {

// Executes one subcommand against a configuration and returns the record
// table it emits. Commands: weak-value, series-compare, aav, regimes,
// transition.
RecordTable run_command(const std::string& command, const KeyValueConfig& config);

}  // namespace weakflow
