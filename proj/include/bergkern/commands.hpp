#pragma once

#include <string>
#include <vector>

#include "bergkern/config.hpp"
#include "bergkern/errors.hpp"
#include "bergkern/report.hpp"

namespace bergkern {

const std::vector<std::string>& command_names();

// Runs one command against its parameters; the resolved parameters
// (defaults included) are echoed in the report config.
Report run_command(const std::string& command, Params& params);

Report cmd_kernel(Params& p);
Report cmd_droplet(Params& p);
Report cmd_obstacle(Params& p);
Report cmd_edge_limit(Params& p);
Report cmd_bulk_limit(Params& p);
Report cmd_partial_kernel(Params& p);
Report cmd_moments(Params& p);
Report cmd_variance(Params& p);
Report cmd_identity_check(Params& p);

// Exit status for an error kind: 2 config/validation, 3 numeric.
int exit_code(ErrorKind kind);

}  // namespace bergkern
