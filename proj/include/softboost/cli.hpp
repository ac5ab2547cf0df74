#pragma once

#include <string>
#include <vector>

namespace softboost {

/// Entry point of the `softboost` command-line tool. Returns the process
/// exit status: 0 success, 2 invalid input or configuration, 3 numeric
/// failure, 1 anything else.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

/// Git blob hash (SHA-1 of "blob <size>\0" + content), hex encoded.
std::string git_blob_hash(const std::string& content);

}  // namespace softboost
