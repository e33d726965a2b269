#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace kinoforge::cli {

enum ExitCode : int { ok = 0, internal_error = 1, invalid_input = 2, no_solution = 3 };

/// Entry point of the `kinoforge` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for input digests in run manifests.
std::uint64_t fnv1a64(std::string_view bytes);
std::string file_digest(const std::string& path);

}  // namespace kinoforge::cli
