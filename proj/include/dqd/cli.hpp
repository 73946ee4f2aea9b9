// Copyright 2026 The dqdctl Authors
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

#ifndef DQD_CLI_HPP
#define DQD_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dqd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitPartial = 2;  // partial convergence or a failed check
inline constexpr int kExitUsage = 64;

/// Runs dqdctl with `args` (program name excluded). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dqd::cli

#endif  // DQD_CLI_HPP
