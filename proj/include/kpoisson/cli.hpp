#pragma once

namespace kpoisson {

/// Command-line entry point. Returns 0 on success, 1 on usage errors and 2 on runtime errors.
int cli_main(int argc, char** argv);

}  // namespace kpoisson
