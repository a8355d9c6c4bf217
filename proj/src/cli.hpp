#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrv::cli {

enum Exit : int {
    kOk = 0,
    kFailure = 1, // property suite found violations
    kValidation = 2,
    kStall = 3,
    kMismatch = 4,
};

/// Runs one command line; args exclude the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qrv::cli
