#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vgpnn {

// Subcommands: generate, retarget, inpaint, analogy, metrics diversity.
// Returns 0 on success, 1 on usage/config errors, 2 on data errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace vgpnn
