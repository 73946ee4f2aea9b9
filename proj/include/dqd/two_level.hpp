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

#ifndef DQD_TWO_LEVEL_HPP
#define DQD_TWO_LEVEL_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

/// Exact dynamics of the effective two-level charge qubit.
///
/// All quantities use hbar = 1. Energies are in the unit of `QubitParams::delta`
/// and times in its inverse, so with the default delta = 1 the free x-rotation
/// period is t_x = 2*pi. The logical basis is {|0>, |1>} with
///
///     H(eps) = -(eps/2) sigma_z + (delta/2) sigma_x,
///
/// which rotates the Bloch vector about the axis (delta, 0, -eps). A detuning of
/// +delta therefore rotates about x' = (1, 0, -1)/sqrt(2) and -delta about
/// z' = (1, 0, 1)/sqrt(2).
namespace dqd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an argument violates an operation's documented domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

template <typename Scalar>
using Complex = std::complex<Scalar>;
template <typename Scalar>
using QubitStateT = Eigen::Matrix<Complex<Scalar>, 2, 1>;
template <typename Scalar>
using Unitary2T = Eigen::Matrix<Complex<Scalar>, 2, 2>;
template <typename Scalar>
using BlochVectorT = Eigen::Matrix<Scalar, 3, 1>;

using QubitState = QubitStateT<double>;
using Unitary2 = Unitary2T<double>;
using Hamiltonian2 = Unitary2T<double>;
using BlochVector = BlochVectorT<double>;

struct QubitParams {
  double delta = 1.0;             // hybridisation gap (internal energy unit)
  double lambda = 0.421;          // eps = e * lambda * V_bias
  double e_charge = 1.602176634e-19;
  double delta_si_ev = 11.7e-6;   // physical gap, only used at I/O boundaries

  double t_x() const { return kTwoPi / delta; }
  /// Period of a full rotation while a detuning `eps` is applied.
  double rotation_period(double eps) const { return kTwoPi / std::hypot(delta, eps); }
  /// Seconds per internal time unit.
  double seconds_per_unit() const {
    constexpr double kHbarEvS = 6.582119569e-16;
    return kHbarEvS * delta / delta_si_ev;
  }
  void validate() const {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("QubitParams: delta must be > 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("QubitParams: lambda must be > 0");
  }
};

// ---------------------------------------------------------------------------
// Basis objects

template <typename Scalar = double>
Unitary2T<Scalar> pauli_x() {
  Unitary2T<Scalar> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Scalar = double>
Unitary2T<Scalar> pauli_y() {
  Unitary2T<Scalar> m;
  m << Complex<Scalar>(0, 0), Complex<Scalar>(0, -1), Complex<Scalar>(0, 1), Complex<Scalar>(0, 0);
  return m;
}

template <typename Scalar = double>
Unitary2T<Scalar> pauli_z() {
  Unitary2T<Scalar> m;
  m << 1, 0, 0, -1;
  return m;
}

template <typename Scalar = double>
BlochVectorT<Scalar> axis_x() { return {1, 0, 0}; }
template <typename Scalar = double>
BlochVectorT<Scalar> axis_y() { return {0, 1, 0}; }
template <typename Scalar = double>
BlochVectorT<Scalar> axis_z() { return {0, 0, 1}; }
/// Rotation axis at eps = +delta.
template <typename Scalar = double>
BlochVectorT<Scalar> axis_x_prime() {
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  return {s, 0, -s};
}
/// Rotation axis at eps = -delta.
template <typename Scalar = double>
BlochVectorT<Scalar> axis_z_prime() {
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  return {s, 0, s};
}

template <typename Scalar = double>
QubitStateT<Scalar> basis_state(int index) {
  QubitStateT<Scalar> s = QubitStateT<Scalar>::Zero();
  s(index == 0 ? 0 : 1) = 1;
  return s;
}

// ---------------------------------------------------------------------------
// Kernels

template <typename Scalar>
Unitary2T<Scalar> pauli_dot(const BlochVectorT<Scalar>& n) {
  return n.x() * pauli_x<Scalar>() + n.y() * pauli_y<Scalar>() + n.z() * pauli_z<Scalar>();
}

/// H = -(eps/2) sigma_z + (delta/2) sigma_x.
template <typename Scalar>
Unitary2T<Scalar> effective_hamiltonian(Scalar eps, const QubitParams& params) {
  const Scalar d = static_cast<Scalar>(params.delta);
  return Scalar(-0.5) * eps * pauli_z<Scalar>() + Scalar(0.5) * d * pauli_x<Scalar>();
}

/// exp(-i angle (n . sigma) / 2). The axis must be a unit vector.
template <typename Scalar>
Unitary2T<Scalar> square_pulse_unitary(const BlochVectorT<Scalar>& axis, Scalar angle) {
  using std::abs;
  if (abs(axis.norm() - Scalar(1)) > Scalar(1e-12)) {
    throw DomainError("square_pulse_unitary: rotation axis must have unit norm");
  }
  const Scalar c = std::cos(angle / 2);
  const Scalar s = std::sin(angle / 2);
  return c * Unitary2T<Scalar>::Identity() - Complex<Scalar>(0, s) * pauli_dot(axis);
}

/// Exact propagator of a constant detuning held for `duration`.
template <typename Scalar>
Unitary2T<Scalar> constant_detuning_unitary(Scalar eps, Scalar duration, const QubitParams& params) {
  const Scalar d = static_cast<Scalar>(params.delta);
  const Scalar omega = Scalar(0.5) * std::hypot(d, eps);
  if (omega == Scalar(0)) return Unitary2T<Scalar>::Identity();
  const Scalar c = std::cos(omega * duration);
  const Scalar s = std::sin(omega * duration) / omega;
  Unitary2T<Scalar> u;
  // cos(w t) I - i sin(w t)/w * H, with H = [[-eps/2, d/2], [d/2, eps/2]]
  u(0, 0) = Complex<Scalar>(c, s * eps / 2);
  u(1, 1) = Complex<Scalar>(c, -s * eps / 2);
  u(0, 1) = Complex<Scalar>(0, -s * d / 2);
  u(1, 0) = u(0, 1);
  return u;
}

template <typename Scalar>
bool is_unitary(const Unitary2T<Scalar>& u, Scalar tol) {
  return ((u.adjoint() * u - Unitary2T<Scalar>::Identity()).cwiseAbs().maxCoeff() <= tol) &&
         (std::abs(std::abs(u.determinant()) - Scalar(1)) <= tol);
}

/// Global-phase-insensitive overlap |Tr(U^dagger V)| / 2.
template <typename Scalar>
Scalar process_fidelity(const Unitary2T<Scalar>& u, const Unitary2T<Scalar>& v) {
  constexpr Scalar kTol = Scalar(1e-8);
  if (!is_unitary(u, kTol) || !is_unitary(v, kTol)) {
    throw DomainError("process_fidelity: inputs must be unitary");
  }
  const Scalar f = std::abs((u.adjoint() * v).trace()) / Scalar(2);
  return std::min(f, Scalar(1));
}

/// |<a|b>|^2 for normalized states.
template <typename Scalar>
Scalar state_fidelity(const QubitStateT<Scalar>& a, const QubitStateT<Scalar>& b) {
  constexpr Scalar kTol = Scalar(1e-9);
  if (std::abs(a.squaredNorm() - Scalar(1)) > kTol || std::abs(b.squaredNorm() - Scalar(1)) > kTol) {
    throw DomainError("state_fidelity: states must be normalized");
  }
  return std::min(std::norm(a.dot(b)), Scalar(1));
}

template <typename Scalar>
struct BlochAnglesT {
  Scalar theta;  // polar, [0, pi]
  Scalar phi;    // azimuth, [0, 2 pi); 0 at the poles
};
using BlochAngles = BlochAnglesT<double>;

/// Angles of psi = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>, up to global phase.
template <typename Scalar>
BlochAnglesT<Scalar> bloch_angles(const QubitStateT<Scalar>& state) {
  const Scalar r0 = std::abs(state(0));
  const Scalar r1 = std::abs(state(1));
  const Scalar theta = Scalar(2) * std::atan2(r1, r0);
  constexpr Scalar kPole = Scalar(1e-14);
  if (r0 < kPole || r1 < kPole) return {theta, Scalar(0)};
  Scalar phi = std::arg(state(1)) - std::arg(state(0));
  phi = std::fmod(phi, Scalar(kTwoPi));
  if (phi < 0) phi += Scalar(kTwoPi);
  if (phi >= Scalar(kTwoPi)) phi = 0;
  return {theta, phi};
}

template <typename Scalar>
QubitStateT<Scalar> state_from_angles(Scalar theta, Scalar phi) {
  QubitStateT<Scalar> s;
  s(0) = std::cos(theta / 2);
  s(1) = std::polar(std::sin(theta / 2), phi);
  return s;
}

template <typename Scalar>
BlochVectorT<Scalar> bloch_vector(const QubitStateT<Scalar>& s) {
  const Complex<Scalar> c = std::conj(s(0)) * s(1);
  return {2 * c.real(), 2 * c.imag(), std::norm(s(0)) - std::norm(s(1))};
}

// ---------------------------------------------------------------------------
// Detuning waveforms

enum class PieceShape {
  Flat,      // eps = amplitude
  SineRise,  // eps = amplitude * sin(pi s / (2 T)), s in [0, T]
  SineFall,  // eps = amplitude * cos(pi s / (2 T))
  Linear,    // eps = start + (amplitude - start) s / T
};

struct WaveformPiece {
  PieceShape shape = PieceShape::Flat;
  double duration = 0.0;
  double amplitude = 0.0;
  double start = 0.0;

  double value_at(double s) const;
};

/// Piecewise detuning eps(t) on [0, duration()], plus a constant offset that
/// models quasistatic charge noise.
class DetuningWaveform {
 public:
  DetuningWaveform() = default;
  explicit DetuningWaveform(std::vector<WaveformPiece> pieces, double offset = 0.0);

  DetuningWaveform& append(const WaveformPiece& piece);
  DetuningWaveform& append(const DetuningWaveform& other);
  /// Free evolution (eps = 0) for `duration`.
  DetuningWaveform& append_gap(double duration);

  double operator()(double t) const;
  double duration() const { return duration_; }
  double offset() const { return offset_; }
  double max_abs() const;
  std::span<const WaveformPiece> pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  DetuningWaveform with_offset(double offset) const;
  /// Same waveform played backwards in time.
  DetuningWaveform reversed() const;

  /// Uniform samples (t, eps) including both end points.
  std::vector<std::pair<double, double>> sample(std::size_t count) const;

 private:
  std::vector<WaveformPiece> pieces_;
  double duration_ = 0.0;
  double offset_ = 0.0;
};

/// Square pulse of constant detuning.
DetuningWaveform constant_waveform(double eps, double duration);

inline double default_dt_max(const QubitParams& params) { return params.t_x() / 5000.0; }

using StateObserver = std::function<void(double t, const QubitState& state)>;

/// Time-ordered evolution of `state` under `waveform`. Constant pieces are
/// applied exactly; shaped pieces use fourth-order Magnus steps no longer than
/// `dt_max`. The observer, if given, sees the state after every step.
QubitState propagate(const QubitState& state, const DetuningWaveform& waveform, const QubitParams& params,
                     double dt_max, const StateObserver& observer = {});
QubitState propagate(const QubitState& state, const DetuningWaveform& waveform, const QubitParams& params);

/// Effective operator of the whole waveform.
Unitary2 realized_unitary(const DetuningWaveform& waveform, const QubitParams& params, double dt_max);
Unitary2 realized_unitary(const DetuningWaveform& waveform, const QubitParams& params);

/// Rotation axis and angle in (0, 2 pi] of a unitary, global phase removed.
struct AxisAngle {
  BlochVector axis;
  double angle;
};
AxisAngle axis_angle(const Unitary2& u);

}  // namespace dqd

#endif  // DQD_TWO_LEVEL_HPP
