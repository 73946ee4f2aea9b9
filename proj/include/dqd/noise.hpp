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

#ifndef DQD_NOISE_HPP
#define DQD_NOISE_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dqd/calibration.hpp"

namespace dqd {

/// Quasistatic detuning noise. sigma is in units of the gap, so an offset
/// draw is sigma * delta * z with z standard normal.
struct NoiseModel {
  double sigma = 0.0;
  std::uint64_t seed = 0;
  int n_samples = 100;

  void validate() const;
};

/// mt19937_64 feeding a polar-free Box-Muller transform: each pair of 53-bit
/// uniforms yields two normals, cosine branch first.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  double uniform();  // (0, 1]
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Offsets for samples 0..n-1 in detuning units.
std::vector<double> draw_offsets(const NoiseModel& model, const QubitParams& params);

struct NoiseReport {
  NoiseModel model;
  double noiseless_fidelity = 1.0;
  double mean_fidelity = 1.0;
  double std_error = 0.0;  // sample std / sqrt(n)
  std::vector<double> fidelities;
  std::vector<double> offsets;  // the draw log

  double mean_error() const { return 1.0 - mean_fidelity; }
};

/// Process fidelity of the waveform against `target`, averaged over offsets.
/// Samples are split across threads by index; results do not depend on the
/// thread count.
NoiseReport run_noisy(const DetuningWaveform& w, const Unitary2& target, const NoiseModel& model,
                      const QubitParams& params, int threads = 1);
/// State fidelity of |in> carried by the waveform against |out>.
NoiseReport run_noisy(const DetuningWaveform& w, const QubitState& in, const QubitState& out,
                      const NoiseModel& model, const QubitParams& params, int threads = 1);

/// Mean infidelities of two pulse trains under the same draws.
struct GainPoint {
  double sigma = 0;
  double error_base = 0;
  double error_variant = 0;
  double gain = 1;  // error_base / error_variant
  double gain_std_error = 0;
  double std_error_base = 0;
  double std_error_variant = 0;
};

/// Square pulses (base) against corrected pulses at tau (variant) for the
/// same decomposition.
std::vector<GainPoint> pulse_comparison(const DecompositionResult& r, double tau, const std::vector<double>& sigmas,
                                        const NoiseModel& model, const CalibrationTable& table,
                                        const QubitParams& params, const AscentConfig& cfg = {}, int threads = 1);

/// Noise gain of subdividing R_x(angle) at rise time tau: base is the
/// one-shot three-pulse train, variant the subdivided one. Both trains use
/// corrected pulses from `table` (ideal square pulses at tau = 0) and see the
/// same draws. sigma = 0 gives unit gain with zero errors.
std::vector<GainPoint> subdivision_gain(double angle, double tau, const std::vector<double>& sigmas,
                                        const NoiseModel& model, const CalibrationTable& table,
                                        const QubitParams& params, const AscentConfig& cfg = {}, int threads = 1);

/// Same comparison for R_z(angle): the one-shot train against k equal
/// rotations of angle / k.
std::vector<GainPoint> z_split_gain(double angle, int slices, double tau, const std::vector<double>& sigmas,
                                    const NoiseModel& model, const CalibrationTable& table,
                                    const QubitParams& params, const AscentConfig& cfg = {}, int threads = 1);

/// sigma,err_square,err_corrected,gain,stderr with base and variant in the
/// two error columns.
std::string gain_csv(const std::vector<GainPoint>& points);

}  // namespace dqd

#endif  // DQD_NOISE_HPP
