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

// Charge readout: which dot holds the electron, and what that says about the
// logical amplitudes.

#ifndef DQD_READOUT_HPP
#define DQD_READOUT_HPP

#include <complex>
#include <vector>

#include "dqd/tdse.hpp"
#include "json.hpp"

namespace dqd {

struct ReadoutCalibration {
  double p0r = 0;    // right-dot probability of logical |0>
  double p1r = 0;    // right-dot probability of logical |1>
  double eta = 0;    // right half-line overlap of the logical states
  double eta_left = 0;
  double split = 0;  // dot boundary, nm

  /// Worst-case |beta^2 estimate - beta^2|.
  double error_bound() const;
};

struct ReadoutEstimate {
  double beta_sq = 0;   // unclamped
  double alpha_sq = 0;  // unclamped
  double error_bound = 0;
  bool clamped = false;  // an unclamped value left [0, 1]

  double beta_sq_clamped() const;
  double alpha_sq_clamped() const;
};

/// x = 0 for mirror-symmetric potentials, else the barrier top nearest 0.
double dot_boundary(const tdse::PotentialSpec& spec, const tdse::Grid1D& grid);

/// Half-line integrals right of `split` on the basis grid.
ReadoutCalibration calibrate_readout(const tdse::SpectralPair& basis, double split = 0.0);

/// Fraction of the density right of `split`.
double measure_p_right(const std::vector<std::complex<double>>& psi, const tdse::Grid1D& grid, double split = 0.0);

/// Right-dot probability predicted for a logical state.
double predicted_p_right(const QubitState& q, const ReadoutCalibration& cal);

ReadoutEstimate estimate_amplitudes(double p_right, const ReadoutCalibration& cal);

void to_json(nlohmann::json& j, const ReadoutCalibration& c);
void to_json(nlohmann::json& j, const ReadoutEstimate& e);

}  // namespace dqd

#endif  // DQD_READOUT_HPP
