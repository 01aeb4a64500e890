#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qstock {

/// Entry point behind the `qstock` executable. `args` excludes the program
/// name. Returns 0 on success, 1 on data/config errors, 2 on usage errors.
int cli_main(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

} // namespace qstock
