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

#include "dqd/two_level.hpp"

#include <algorithm>
#include <cmath>

namespace dqd {

double WaveformPiece::value_at(double s) const {
  switch (shape) {
    case PieceShape::Flat:
      return amplitude;
    case PieceShape::SineRise:
      return duration > 0 ? amplitude * std::sin(kPi * s / (2 * duration)) : amplitude;
    case PieceShape::SineFall:
      return duration > 0 ? amplitude * std::cos(kPi * s / (2 * duration)) : amplitude;
    case PieceShape::Linear:
      return duration > 0 ? start + (amplitude - start) * (s / duration) : amplitude;
  }
  return amplitude;
}

DetuningWaveform::DetuningWaveform(std::vector<WaveformPiece> pieces, double offset) : offset_(offset) {
  if (!std::isfinite(offset)) throw DomainError("DetuningWaveform: offset must be finite");
  for (const auto& p : pieces) append(p);
}

DetuningWaveform& DetuningWaveform::append(const WaveformPiece& piece) {
  if (!(piece.duration >= 0) || !std::isfinite(piece.duration) || !std::isfinite(piece.amplitude) ||
      !std::isfinite(piece.start)) {
    throw DomainError("DetuningWaveform: piece duration must be >= 0 and values finite");
  }
  if (piece.duration == 0) return *this;
  pieces_.push_back(piece);
  duration_ += piece.duration;
  return *this;
}

DetuningWaveform& DetuningWaveform::append(const DetuningWaveform& other) {
  for (const auto& p : other.pieces_) append(p);
  return *this;
}

DetuningWaveform& DetuningWaveform::append_gap(double duration) {
  return append(WaveformPiece{PieceShape::Flat, duration, 0.0, 0.0});
}

double DetuningWaveform::operator()(double t) const {
  double t0 = 0;
  for (const auto& p : pieces_) {
    if (t <= t0 + p.duration) return p.value_at(std::max(0.0, t - t0)) + offset_;
    t0 += p.duration;
  }
  return (pieces_.empty() ? 0.0 : pieces_.back().value_at(pieces_.back().duration)) + offset_;
}

double DetuningWaveform::max_abs() const {
  double m = 0;
  for (const auto& p : pieces_) {
    switch (p.shape) {
      case PieceShape::Linear:
        m = std::max({m, std::abs(p.start + offset_), std::abs(p.amplitude + offset_)});
        break;
      case PieceShape::Flat:
        m = std::max(m, std::abs(p.amplitude + offset_));
        break;
      default:
        m = std::max({m, std::abs(offset_), std::abs(p.amplitude + offset_)});
    }
  }
  return m;
}

DetuningWaveform DetuningWaveform::with_offset(double offset) const {
  DetuningWaveform w = *this;
  if (!std::isfinite(offset)) throw DomainError("DetuningWaveform: offset must be finite");
  w.offset_ = offset;
  return w;
}

DetuningWaveform DetuningWaveform::reversed() const {
  DetuningWaveform w;
  w.offset_ = offset_;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    WaveformPiece p = *it;
    switch (p.shape) {
      case PieceShape::SineRise:
        p.shape = PieceShape::SineFall;
        break;
      case PieceShape::SineFall:
        p.shape = PieceShape::SineRise;
        break;
      case PieceShape::Linear:
        std::swap(p.start, p.amplitude);
        break;
      case PieceShape::Flat:
        break;
    }
    w.append(p);
  }
  return w;
}

std::vector<std::pair<double, double>> DetuningWaveform::sample(std::size_t count) const {
  std::vector<std::pair<double, double>> out;
  if (count == 0) return out;
  if (count == 1) {
    out.emplace_back(0.0, (*this)(0.0));
    return out;
  }
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = duration_ * static_cast<double>(i) / static_cast<double>(count - 1);
    out.emplace_back(t, (*this)(t));
  }
  return out;
}

DetuningWaveform constant_waveform(double eps, double duration) {
  DetuningWaveform w;
  w.append(WaveformPiece{PieceShape::Flat, duration, eps, 0.0});
  return w;
}

namespace {

void check_dt(double dt_max, const QubitParams& params) {
  params.validate();
  if (!(dt_max > 0) || !std::isfinite(dt_max)) throw DomainError("propagate: dt_max must be > 0");
  if (dt_max > params.t_x() / 1000.0 * (1 + 1e-12)) {
    throw DomainError("propagate: dt_max must not exceed t_x/1000");
  }
}

// exp(-i a.sigma)
Unitary2 su2_exp(double ax, double ay, double az) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  const double c = std::cos(n);
  const double k = n > 0 ? std::sin(n) / n : 1.0;
  using C = std::complex<double>;
  Unitary2 u;
  u << C(c, -k * az), C(-k * ay, -k * ax), C(k * ay, -k * ax), C(c, k * az);
  return u;
}

// Fourth-order Magnus step over [s, s + h] of a shaped piece, two Gauss
// points. The commutator of the two sampled Hamiltonians only has a sigma_y
// part.
Unitary2 magnus_step(const WaveformPiece& p, double s, double h, double off, double delta) {
  constexpr double g = 0.28867513459481288;  // sqrt(3) / 6
  const double e1 = p.value_at(s + (0.5 - g) * h) + off;
  const double e2 = p.value_at(s + (0.5 + g) * h) + off;
  const double mean = 0.5 * (e1 + e2);
  return su2_exp(0.5 * delta * h, 0.5 * g * delta * h * h * (e1 - e2) * 0.5, -0.5 * mean * h);
}

long step_count(double duration, double dt_max) {
  return std::max(1L, static_cast<long>(std::ceil(duration / dt_max - 1e-9)));
}

}  // namespace

QubitState propagate(const QubitState& state, const DetuningWaveform& waveform, const QubitParams& params,
                     double dt_max, const StateObserver& observer) {
  check_dt(dt_max, params);
  QubitState psi = state;
  const double off = waveform.offset();
  double t0 = 0;
  for (const auto& p : waveform.pieces()) {
    if (p.shape == PieceShape::Flat && !observer) {
      psi = constant_detuning_unitary(p.amplitude + off, p.duration, params) * psi;
    } else {
      const long steps = step_count(p.duration, dt_max);
      const double h = p.duration / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        psi = (p.shape == PieceShape::Flat ? constant_detuning_unitary(p.amplitude + off, h, params)
                                           : magnus_step(p, static_cast<double>(k) * h, h, off, params.delta)) *
              psi;
        if (observer) observer(t0 + static_cast<double>(k + 1) * h, psi);
      }
    }
    t0 += p.duration;
  }
  const double nrm = psi.norm();
  if (nrm > 0) psi /= nrm;
  return psi;
}

QubitState propagate(const QubitState& state, const DetuningWaveform& waveform, const QubitParams& params) {
  return propagate(state, waveform, params, default_dt_max(params));
}

Unitary2 realized_unitary(const DetuningWaveform& waveform, const QubitParams& params, double dt_max) {
  check_dt(dt_max, params);
  Unitary2 u = Unitary2::Identity();
  const double off = waveform.offset();
  for (const auto& p : waveform.pieces()) {
    if (p.shape == PieceShape::Flat) {
      u = constant_detuning_unitary(p.amplitude + off, p.duration, params) * u;
      continue;
    }
    const long steps = step_count(p.duration, dt_max);
    const double h = p.duration / static_cast<double>(steps);
    for (long k = 0; k < steps; ++k) u = magnus_step(p, static_cast<double>(k) * h, h, off, params.delta) * u;
  }
  // Re-unitarize to absorb rounding accumulated over many steps.
  Eigen::JacobiSVD<Unitary2> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Unitary2 realized_unitary(const DetuningWaveform& waveform, const QubitParams& params) {
  return realized_unitary(waveform, params, default_dt_max(params));
}

AxisAngle axis_angle(const Unitary2& u) {
  // Strip the global phase so that u = cos(a/2) I - i sin(a/2) n.sigma.
  const std::complex<double> det = u.determinant();
  const Unitary2 su = u / std::sqrt(det);
  const double c = 0.5 * su.trace().real();
  BlochVector v{-0.5 * (su(0, 1) + su(1, 0)).imag(), 0.5 * (su(1, 0) - su(0, 1)).real(),
                -0.5 * (su(0, 0) - su(1, 1)).imag()};
  const double s = v.norm();
  double angle = 2 * std::atan2(s, c);
  if (s < 1e-15) return {axis_z<double>(), angle < 1.0 ? kTwoPi : angle};
  return {v / s, angle};
}

}  // namespace dqd
