// Copyright 2026 The bellmd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BELLMD_TOOLS_CLI_H
#define BELLMD_TOOLS_CLI_H

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bellmd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitVerification = 3;
inline constexpr int kExitSolver = 4;

/// "start:stop:count" with count >= 2 and start < stop. `stop` may be the
/// word "max", replaced by `max_value`.
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;

    static GridSpec parse(const std::string &text, double max_value = 0.0);
    std::vector<double> values() const;
};

/// 12 significant digits, shortest %g form.
std::string format_number(double value);

/// Writes to a temporary file beside `path`, then renames it into place.
void write_atomic(const std::filesystem::path &path, const std::string &content);

/// Turns a JSON config object into flags. "command" names the subcommand;
/// true booleans become bare flags, arrays repeat the value list.
std::vector<std::string> config_to_args(const std::string &json_text);

/// Entry point. `args` excludes the program name. Returns the exit code.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace bellmd::cli

#endif
