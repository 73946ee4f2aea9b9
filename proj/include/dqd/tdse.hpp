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

// One-dimensional double-dot simulator. Units: meV, nm, ps, volts.

#ifndef DQD_TDSE_HPP
#define DQD_TDSE_HPP

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dqd/two_level.hpp"
#include "json.hpp"

namespace dqd::tdse {

inline constexpr double kHbar = 0.6582119569;            // meV ps
inline constexpr double kHbarSqOver2Me = 38.0998212;     // meV nm^2
inline constexpr double kGaAsMass = 0.067;               // m* / m_e

/// Raised before stepping when dt exceeds hbar / E_max.
class StabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an eigenpair or fit cannot be obtained.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Grid1D {
  double x_min = -230.0;
  double x_max = 230.0;
  int n_points = 1024;

  void validate() const;
  double dx() const { return (x_max - x_min) / (n_points - 1); }
  double x(int i) const { return x_min + i * dx(); }
  bool symmetric() const;
};

struct PotentialSpec {
  double a_coef = 1.414714e-4;     // meV nm^-2
  double b_height = 4.08;          // meV
  double sigma_width = 5575.1443;  // nm^2, enters as x^2 / (2 sigma)
  double half_width = 230.0;       // nm
  double v_bias = 0.0;             // volts
  double mass_ratio = kGaAsMass;   // m* / m_e
  double asymmetry = 0.0;          // meV, adds asymmetry * (x / w)^3

  void validate() const;
  /// hbar^2 / (2 m*) in meV nm^2.
  double kinetic_scale() const { return kHbarSqOver2Me / mass_ratio; }
  /// Barrier exceeds the harmonic curvature at the origin.
  bool double_well() const;
  bool symmetric() const { return v_bias == 0 && asymmetry == 0; }
};

/// Energy in meV, bias term included.
double potential(const PotentialSpec& spec, double x);
/// Potential without the bias term, and the bias slope per volt.
double static_potential(const PotentialSpec& spec, double x);
double bias_profile(const PotentialSpec& spec, double x);

struct Eigenpair {
  double energy = 0;
  std::vector<double> psi;  // full grid, ends pinned to zero, dx-normalised
  double residual = 0;      // ||H psi - E psi|| / ||psi||
};

/// k lowest eigenpairs of the finite-difference Hamiltonian.
std::vector<Eigenpair> stationary_states(const PotentialSpec& spec, const Grid1D& grid, int k);

struct SpectralPair {
  Grid1D grid;
  double e_bonding = 0;
  double e_antibonding = 0;
  std::vector<double> psi_bonding;
  std::vector<double> psi_antibonding;

  double gap() const { return e_antibonding - e_bonding; }
  /// (B + AB) / sqrt 2, the left-localised logical state.
  std::vector<double> logical_zero() const;
  std::vector<double> logical_one() const;
};

/// Bonding pair at the spec's bias. Signs fix psi_bonding > 0 and
/// psi_antibonding > 0 on the left; on symmetric setups each state is solved
/// in its own parity sector.
SpectralPair spectral_pair(const PotentialSpec& spec, const Grid1D& grid);

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, double dx);

/// Gershgorin bound of the discretised Hamiltonian for |bias| <= max_bias.
double e_max_bound(const PotentialSpec& spec, const Grid1D& grid, double max_bias);
/// hbar / E_max.
double stability_limit(const PotentialSpec& spec, const Grid1D& grid, double max_bias);

/// u holds Re psi at `time`; v holds Im psi at time + dt / 2 and v_lag at
/// time - dt / 2. Entries 0 and n-1 stay zero.
struct Wavefunction1D {
  Grid1D grid;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> v_lag;
  double time = 0;  // ps
  double dt = 0;    // ps

  /// Plain average of the two half steps; off by O(dt^2 E^2) per mode.
  std::vector<std::complex<double>> psi_average() const;
};

using BiasFunction = std::function<double(double t_ps)>;
using Snapshot = std::function<void(double t_ps, const std::vector<std::complex<double>>& psi)>;

class Propagator {
 public:
  /// Checks dt against hbar / E_max at max_bias once, before any stepping.
  Propagator(const PotentialSpec& spec, const Grid1D& grid, double dt, double max_bias);

  /// Staggers a synchronous psi: second-order bootstrap of both half steps.
  Wavefunction1D start(const std::vector<std::complex<double>>& psi, double t0, double bias) const;
  /// One leapfrog update. bias_mid acts on u, bias_end on v.
  void step(Wavefunction1D& wf, double bias_mid, double bias_end) const;
  /// Applies H at the given bias to a real vector.
  void apply(const std::vector<double>& in, std::vector<double>& out, double bias) const;
  /// Synchronous psi at wf.time. The half-step average is rescaled by
  /// 1 / cos(dt E / 2 hbar) to fourth order, so a stationary state keeps its
  /// density to O(dt^4).
  std::vector<std::complex<double>> psi(const Wavefunction1D& wf, double bias) const;

  double dt() const { return dt_; }
  const Grid1D& grid() const { return grid_; }

 private:
  Grid1D grid_;
  std::vector<double> v0_;
  std::vector<double> slope_;
  double kin_;
  double dt_;
};

struct Evolution {
  Wavefunction1D wf;
  std::vector<std::complex<double>> psi;  // synchronous, at the end
  long steps = 0;
};

/// Runs from psi over `duration` with ceil(duration / dt_max) equal steps.
/// The snapshot callback sees the start, every `cadence` steps, and the end.
Evolution evolve(const std::vector<std::complex<double>>& psi, const PotentialSpec& spec, const Grid1D& grid,
                 const BiasFunction& bias, double duration, double dt_max, double max_bias,
                 const Snapshot& snapshot = {}, int cadence = 0);

std::vector<std::complex<double>> real_state(const std::vector<double>& psi);
double norm(const std::vector<std::complex<double>>& psi, double dx);
/// |<a|b>|^2 with the dx-weighted inner product.
double overlap(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b, double dx);

struct LambdaFit {
  double lambda = 0;
  double residual = 0;    // max |eps - fit| / max |eps|
  double delta_mev = 0;   // zero-bias gap
  std::vector<double> bias;
  std::vector<double> eps;  // meV
};

/// Fits eps = 1000 lambda V through the origin from gap(V) = sqrt(Delta^2 + eps^2).
/// The grid must be symmetric about zero.
LambdaFit calibrate_lambda(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& bias_grid);

/// Bias grid covering |eps| <= span * Delta, located with a probe fit.
std::vector<double> operating_bias_grid(const PotentialSpec& spec, const Grid1D& grid, double span = 1.0,
                                        int points = 9);

/// Conversion between two-level units (hbar = 1, gap = model_delta) and lab
/// units.
struct LabUnits {
  double delta_mev = 0;
  double lambda = 0;
  double model_delta = 1.0;

  double mev(double e) const { return e * delta_mev / model_delta; }
  double ps(double t) const { return t * kHbar * model_delta / delta_mev; }
  double model_time(double t_ps) const { return t_ps * delta_mev / (kHbar * model_delta); }
  /// Logical amplitudes are conjugated relative to the lab frame, which flips
  /// the sign of the detuning.
  double volts(double eps) const { return -mev(eps) / (1000.0 * lambda); }
};

struct Projection {
  QubitState state;
  double leakage = 0;
  double weight = 0;  // |<0|psi>|^2 + |<1|psi>|^2
};

Projection project_logical(const std::vector<std::complex<double>>& psi, const SpectralPair& basis);
/// Inverse of project_logical for a state in the logical span.
std::vector<std::complex<double>> embed_logical(const QubitState& q, const SpectralPair& basis);

/// Bias waveform in volts for a two-level detuning waveform.
BiasFunction bias_function(const DetuningWaveform& w, const LabUnits& units);
double max_abs_bias(const DetuningWaveform& w, const LabUnits& units);

/// x,re,im,density,potential
std::string snapshot_csv(const std::vector<std::complex<double>>& psi, const PotentialSpec& spec, const Grid1D& grid,
                         double bias);

void to_json(nlohmann::json& j, const Grid1D& g);
void from_json(const nlohmann::json& j, Grid1D& g);
void to_json(nlohmann::json& j, const PotentialSpec& s);
void from_json(const nlohmann::json& j, PotentialSpec& s);

}  // namespace dqd::tdse

#endif  // DQD_TDSE_HPP
