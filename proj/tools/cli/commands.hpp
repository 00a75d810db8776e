#pragma once

#include <string>
#include <vector>

namespace topicsent::cli {

// Exit statuses. A command returns kOk only after every artifact it
// promises has been written.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;

/// Parses the command line and runs one subcommand:
///   preprocess, train-embed, train-clf, baseline, evaluate, predict,
///   explain-word, top-words.
/// Global options: --config FILE, --workdir DIR, --input FILE, --quiet.
/// Data goes to files or stdout; logs go to stderr.
int run(int argc, const char* const* argv);

/// Same as above with the program name omitted; convenient for tests.
int run(const std::vector<std::string>& args);

}  // namespace topicsent::cli
