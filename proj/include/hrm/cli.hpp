#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hrm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Entry point for the `hrm` command. `args` excludes the program name.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hrm
