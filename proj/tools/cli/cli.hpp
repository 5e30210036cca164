#pragma once

namespace partmotion::cli {

// Parses argv, runs one subcommand and returns the process exit status:
// 0 success, 1 validation failure, 2 configuration error, 3 runtime failure.
// Errors are reported on stderr as one JSON object {error, message, detail}.
int run(int argc, const char* const* argv);

}  // namespace partmotion::cli
