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

#ifndef DQD_PULSE_HPP
#define DQD_PULSE_HPP

#include <array>
#include <vector>

#include "dqd/decomposition.hpp"
#include "dqd/two_level.hpp"
#include "json.hpp"

/// Time-domain pulses for primitive rotations.
///
/// Durations here are in internal time units (see two_level.hpp). A ramped
/// pulse is a quarter-sine rise of length tau, a flat top and the mirrored
/// fall. Its correction (xi, delta_t) scales the amplitude to xi * delta and
/// sets the *total* pulse length, ramps included, to
/// square_duration(angle) + delta_t. A complement pulse (angle + 2 pi) keeps
/// the same reference, so its delta_t includes the extra turn.
namespace dqd {

enum class RampShape { Sine };

struct RiseSpec {
  double tau = 0.0;  // full 0 -> 100 % ramp time
  RampShape shape = RampShape::Sine;
};

struct CorrectionEntry {
  double tau = 0.0;
  double target_angle = 0.0;
  double xi = 1.0;
  double delta_t = 0.0;
  double residual_error = 0.0;
  bool complement = false;  // realised as target_angle + 2 pi

  double realized_angle() const { return complement ? target_angle + kTwoPi : target_angle; }
};

struct PulseSegment {
  double amplitude = 0.0;  // signed detuning; + for x', - for z'
  double flat_duration = 0.0;
  RiseSpec rise;

  double duration() const { return flat_duration + 2 * rise.tau; }
};

struct PulseTrain {
  std::vector<PulseSegment> segments;
  double gap = 0.0;  // free evolution between segments

  double duration() const;
  DetuningWaveform waveform() const;
};

/// Length of an ideal square pulse rotating by `angle` about x' or z'.
double square_duration(double angle, const QubitParams& params);
double primitive_amplitude(PrimitiveAxis axis, const QubitParams& params);

PulseSegment square_segment(const PrimitiveRotation& p, const QubitParams& params);
PulseSegment ramped_segment(const PrimitiveRotation& p, const RiseSpec& rise, const CorrectionEntry& c,
                            const QubitParams& params);
DetuningWaveform segment_waveform(const PulseSegment& s);

DetuningWaveform square_waveform(const PrimitiveRotation& p, const QubitParams& params);
DetuningWaveform ramped_waveform(const PrimitiveRotation& p, const RiseSpec& rise, const CorrectionEntry& c,
                                 const QubitParams& params);

/// Zero-flat-top lobe of width 2 tau whose amplitude puts the rotation axis
/// on x'.
struct MinAngleLobe {
  double xi = 0.0;
  double angle = 0.0;
};
inline constexpr double kMaxTauOverTx = 0.25;
MinAngleLobe min_angle_lobe(double tau, const QubitParams& params);
double min_angle(double tau, const QubitParams& params);
/// Inverse of min_angle on [0, kMaxTauOverTx * t_x].
double tau_for_min_angle(double angle, const QubitParams& params);

/// Minimum angles of the reference rise times, and those rise times as
/// fractions of t_x.
inline constexpr std::array<double, 5> kReferenceMinAngles{kPi / 8, kPi / 6, kPi / 4, kPi / 3, kPi / 2};
extern const std::array<double, 5> kReferenceTauOverTx;
std::array<double, 5> reference_taus(const QubitParams& params);

/// Full-ramp tau from a measured lo..hi (fractions of the step) rise time of a
/// quarter-sine edge, e.g. lo = 0.1, hi = 0.9.
double full_ramp_from_partial(double measured, double lo, double hi);

struct SubdivisionPlan {
  int slices = 1;
  double slice_angle = 0.0;
  bool complement = false;
  std::vector<PrimitiveRotation> primitives;  // application order
};
/// R_x(angle) as `slices` equal three-pulse slices with neighbouring x'
/// pulses merged. The slice count is the largest for which every emitted
/// primitive stays at or above min_angle(tau). When no count qualifies the
/// single-slice plan is returned; angles below the minimum are flagged
/// `complement`. Primitives under the floor are realised as angle + 2 pi at
/// calibration time.
SubdivisionPlan subdivide_x(double angle, double tau, const QubitParams& params);
/// Same plan with a fixed slice count.
SubdivisionPlan subdivide_x_fixed(double angle, int slices);

nlohmann::json pulse_train_json(const std::vector<PrimitiveRotation>& prims, const std::vector<CorrectionEntry>& corr,
                                const QubitParams& params);

}  // namespace dqd

#endif  // DQD_PULSE_HPP
