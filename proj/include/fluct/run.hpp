#pragma once

#include "fluct/config.hpp"

namespace fluct {

// Execute a parsed config end to end and write its artifacts under
// config.outDir. Returns 0 on success (or comparison pass), 1 when a
// comparison fails. Config problems throw ValidationError; runtime failures
// throw the originating exception.
int run_with_config(const RunConfig& config);

} // namespace fluct
