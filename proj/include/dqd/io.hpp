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

#ifndef DQD_IO_HPP
#define DQD_IO_HPP

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dqd/tdse.hpp"
#include "dqd/two_level.hpp"
#include "json.hpp"

namespace dqd {

#ifndef DQD_VERSION
#define DQD_VERSION "0.0.0"
#endif
inline constexpr std::string_view kVersion = DQD_VERSION;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

/// Everything that shapes a run's numbers. Output directory and thread count
/// do not, and stay out of the hash.
struct RunConfig {
  QubitParams qubit;
  tdse::Grid1D grid;
  tdse::PotentialSpec potential;
  std::vector<double> taus;  // in t_x; empty means the first `tau_ref` reference rise times
  int tau_ref = 5;
  int angle_count = 16;      // angles 2 pi k / n, k = 1..n
  std::vector<double> sigmas{0.01, 0.02, 0.05, 0.1, 0.15, 0.2};
  int samples = 400;
  std::uint64_t seed = 2026;
  double dt_fraction = 0.5;  // TDSE step as a fraction of hbar / E_max
  int snapshot_every = 0;    // TDSE steps between trajectory samples; 0 picks about 400 samples
  std::string out = "out";
  int threads = 0;           // 0: hardware concurrency

  void validate() const;
  std::vector<double> tau_values() const;  // internal time units
  std::vector<double> angle_values() const;
  /// Canonical form; keys sorted.
  nlohmann::json to_json() const;
  /// Unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  std::uint64_t hash() const { return fnv1a64(to_json().dump()); }
  int thread_count() const;
};

RunConfig load_config(const std::filesystem::path& path);

/// Hash over the canonical config plus the command's own options.
std::uint64_t run_hash(const RunConfig& cfg, const nlohmann::json& options = {});
/// "# dqdctl <version> config=<hash> seed=<seed>"
std::string metadata_line(const RunConfig& cfg, const nlohmann::json& options = {});
nlohmann::json metadata_json(const RunConfig& cfg, const nlohmann::json& options = {});

/// Writes atomically enough for our purposes; throws IoError.
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// Accepts "pi", "3pi/2", "3*pi/4", "-pi/8", "1.25".
double parse_angle(std::string_view text);

}  // namespace dqd

#endif  // DQD_IO_HPP
