#pragma once

namespace repsel {

/// Entry point shared by the repsel binary and the CLI tests. Returns the
/// process exit status.
int cli_main(int argc, const char* const* argv);

}  // namespace repsel
