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

#ifndef DQD_CALIBRATION_HPP
#define DQD_CALIBRATION_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqd/decomposition.hpp"
#include "dqd/pulse.hpp"
#include "json.hpp"

namespace dqd {

/// Raised when a calibration table has no usable entry for (tau, angle).
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AscentConfig {
  double step_xi = 0.05;   // largest move per iteration
  double step_dt = 0.05;   // largest move per iteration, in t_x
  double shrink = 0.5;
  int max_evals = 20000;
  double tolerance = 1e-8;  // stop once 1 - F drops below this
  double min_step = 1e-7;   // stop once both moves fall below this
  double h_xi = 1e-4;
  double h_dt = 1e-4;       // in t_x
  double accept = 1e-4;     // largest residual a stored entry may carry

  void validate() const;
};

/// Process fidelity of the ramped x' pulse against the ideal rotation.
double objective(double xi, double delta_t, double tau, double angle, const QubitParams& params);

struct CalibrationResult {
  CorrectionEntry entry;
  bool converged = false;
  int evaluations = 0;
  std::string message;
};

struct StartPoint {
  double xi;
  double delta_t;
};

/// Finite-difference gradient ascent on (xi, delta_t) with backtracking.
/// `angle` below min_angle(tau) is only accepted with `complement`, which
/// calibrates angle + 2 pi instead.
CalibrationResult calibrate_point(double tau, double angle, const QubitParams& params, const AscentConfig& cfg,
                                  bool complement = false, std::optional<StartPoint> start = std::nullopt);

class CalibrationTable {
 public:
  static constexpr int kSchemaVersion = 1;

  CalibrationTable() = default;
  CalibrationTable(QubitParams params, double accept) : params_(params), accept_(accept) {}

  /// Rejects entries whose residual is not below the table's acceptance.
  void insert(const CorrectionEntry& e);
  const CorrectionEntry* find(double tau, double angle) const;
  std::vector<CorrectionEntry> line(double tau) const;
  std::vector<double> taus() const;
  const std::vector<CorrectionEntry>& entries() const { return entries_; }
  const QubitParams& params() const { return params_; }
  double accept() const { return accept_; }
  bool empty() const { return entries_.empty(); }

  nlohmann::json to_json() const;
  static CalibrationTable from_json(const nlohmann::json& j);
  /// tau,angle,xi,delta_t,residual with durations in t_x.
  std::string to_csv() const;

 private:
  QubitParams params_;
  double accept_ = 1e-4;
  std::vector<CorrectionEntry> entries_;  // sorted by (tau, angle)
};

struct BuildReport {
  CalibrationTable table;
  std::vector<CalibrationResult> failures;
  std::vector<std::string> warnings;  // delta_t trend violations
};

/// Calibrates every (tau, angle) pair. Angles below min_angle(tau) are
/// calibrated as angle + 2 pi. Each tau line is warm-started along increasing
/// angle, complement points along decreasing angle; lines run concurrently and
/// are merged in grid order.
BuildReport build_table(const std::vector<double>& taus, const std::vector<double>& angles, const QubitParams& params,
                        const AscentConfig& cfg, int threads = 1);

/// delta_t trend violations of one tau line. Only direct entries are
/// compared; complement pulses carry an extra turn and sit on another branch.
std::vector<std::string> trend_violations(const std::vector<CorrectionEntry>& line);

/// Entry for (tau, angle): exact hit, or piecewise-cubic interpolation in the
/// realised angle, re-verified and locally re-optimised when needed.
CorrectionEntry resolve_entry(const CalibrationTable& table, double tau, double angle, const AscentConfig& cfg);

/// Concatenated corrected waveform of a decomposition. tau = 0 gives ideal
/// square pulses and needs no table.
DetuningWaveform train_waveform(const DecompositionResult& r, const RiseSpec& rise, const CalibrationTable& table,
                                const QubitParams& params, const AscentConfig& cfg = {});
std::vector<CorrectionEntry> train_corrections(const DecompositionResult& r, const RiseSpec& rise,
                                               const CalibrationTable& table, const AscentConfig& cfg = {});

/// Process fidelity of the corrected x' pulse against the ideal rotation about
/// the given primitive axis; symmetric under the axis swap.
double entry_fidelity(const CorrectionEntry& e, PrimitiveAxis axis, const QubitParams& params);

}  // namespace dqd

#endif  // DQD_CALIBRATION_HPP
