#ifndef VARHSMM_TOOLS_COMMANDS_HPP
#define VARHSMM_TOOLS_COMMANDS_HPP

namespace varhsmm::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kInvalidInput = 2,
  kNotConverged = 3,
};

/// Parses argv, runs one subcommand and maps failures onto ExitCode.
/// Diagnostics go to stderr.
int run_cli(int argc, char** argv);

}  // namespace varhsmm::cli

#endif  // VARHSMM_TOOLS_COMMANDS_HPP
