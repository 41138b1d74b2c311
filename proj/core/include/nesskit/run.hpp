#pragma once

#include <ostream>
#include <string>

#include "nesskit/config.hpp"

namespace nesskit {

// Dispatches one CLI command (check | lso | ness | thermo | dynamics), writing
// report files under out_dir. Returns the process exit code: 0 success,
// 2 configuration error, 3 physics precondition failure, 4 numerical failure.
// Every nonzero exit writes a machine-readable error object to `diagnostics`.
int run_command(const std::string& command, const RunConfig& cfg,
                const std::string& out_dir, std::ostream& diagnostics);

} // namespace nesskit
