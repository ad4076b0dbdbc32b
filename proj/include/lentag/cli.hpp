#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lentag::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kRuntime = 3 };

/// Whitespace split with leading and trailing punctuation detached, one
/// character per punctuation token.
std::vector<std::string> tokenize(const std::string& text);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace lentag::cli
