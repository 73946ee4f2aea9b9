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

#include "dqd/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/tools/roots.hpp>

namespace dqd {

// Recovered by tau_for_min_angle with delta = 1; see pulse_test.
const std::array<double, 5> kReferenceTauOverTx{0.022132683771589525, 0.029547346195615234, 0.044481378183959863,
                                                0.059612380510934079, 0.09076567116764829};

double PulseTrain::duration() const {
  double d = 0;
  for (const auto& s : segments) d += s.duration();
  if (segments.size() > 1) d += gap * static_cast<double>(segments.size() - 1);
  return d;
}

DetuningWaveform PulseTrain::waveform() const {
  if (gap < 0) throw DomainError("PulseTrain: gap must be >= 0");
  DetuningWaveform w;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i > 0 && gap > 0) w.append_gap(gap);
    w.append(segment_waveform(segments[i]));
  }
  return w;
}

double square_duration(double angle, const QubitParams& params) {
  return angle / std::hypot(params.delta, params.delta);
}

double primitive_amplitude(PrimitiveAxis axis, const QubitParams& params) {
  return axis == PrimitiveAxis::XPrime ? params.delta : -params.delta;
}

PulseSegment square_segment(const PrimitiveRotation& p, const QubitParams& params) {
  return PulseSegment{primitive_amplitude(p.axis, params), square_duration(p.angle, params), RiseSpec{}};
}

PulseSegment ramped_segment(const PrimitiveRotation& p, const RiseSpec& rise, const CorrectionEntry& c,
                            const QubitParams& params) {
  constexpr double kMatch = 1e-9;
  if (std::abs(c.tau - rise.tau) > kMatch * std::max(1.0, rise.tau) ||
      std::abs(c.target_angle - p.angle) > kMatch * std::max(1.0, p.angle)) {
    throw DomainError("ramped pulse: correction entry does not match (tau, angle)");
  }
  if (!(c.xi > 0) || rise.tau < 0) throw DomainError("ramped pulse: xi must be > 0 and tau >= 0");
  double flat = square_duration(c.target_angle, params) + c.delta_t - 2 * rise.tau;
  if (flat < -1e-12) throw DomainError("ramped pulse: correction leaves a negative flat top");
  flat = std::max(flat, 0.0);
  return PulseSegment{c.xi * primitive_amplitude(p.axis, params), flat, rise};
}

DetuningWaveform segment_waveform(const PulseSegment& s) {
  DetuningWaveform w;
  w.append(WaveformPiece{PieceShape::SineRise, s.rise.tau, s.amplitude, 0});
  w.append(WaveformPiece{PieceShape::Flat, s.flat_duration, s.amplitude, 0});
  w.append(WaveformPiece{PieceShape::SineFall, s.rise.tau, s.amplitude, 0});
  return w;
}

DetuningWaveform square_waveform(const PrimitiveRotation& p, const QubitParams& params) {
  return segment_waveform(square_segment(p, params));
}

DetuningWaveform ramped_waveform(const PrimitiveRotation& p, const RiseSpec& rise, const CorrectionEntry& c,
                                 const QubitParams& params) {
  return segment_waveform(ramped_segment(p, rise, c, params));
}

namespace {

Unitary2 lobe_unitary(double xi, double tau, const QubitParams& params) {
  DetuningWaveform w;
  w.append(WaveformPiece{PieceShape::SineRise, tau, xi * params.delta, 0});
  w.append(WaveformPiece{PieceShape::SineFall, tau, xi * params.delta, 0});
  return realized_unitary(w, params);
}

// sin(a/2) n for an SU(2) matrix cos(a/2) I - i sin(a/2) n.sigma.
BlochVector rotation_vector(const Unitary2& u) {
  return {-0.5 * (u(0, 1) + u(1, 0)).imag(), 0.5 * (u(1, 0) - u(0, 1)).real(), -0.5 * (u(0, 0) - u(1, 1)).imag()};
}

// Off-axis component of the lobe rotation: zero when the axis is x'.
double lobe_axis_error(double xi, double tau, const QubitParams& params) {
  const BlochVector v = rotation_vector(lobe_unitary(xi, tau, params));
  return v.x() + v.z();
}

}  // namespace

MinAngleLobe min_angle_lobe(double tau, const QubitParams& params) {
  params.validate();
  if (tau < 0) throw DomainError("min_angle: tau must be >= 0");
  if (tau == 0) return {1.0, 0.0};
  if (tau > kMaxTauOverTx * params.t_x() * (1 + 1e-12)) {
    throw DomainError("min_angle: tau above the supported range (t_x / 4)");
  }
  auto f = [&](double xi) { return lobe_axis_error(xi, tau, params); };
  double lo = 0.05, flo = f(lo);
  double hi = lo, fhi = flo;
  for (double xi = 0.1; xi <= 6.0 + 1e-12; xi += 0.05) {
    const double fx = f(xi);
    if ((flo > 0) != (fx > 0)) {
      hi = xi;
      fhi = fx;
      break;
    }
    lo = xi;
    flo = fx;
  }
  if (hi == lo) throw DomainError("min_angle: no x'-aligned lobe found");
  std::uintmax_t iters = 100;
  auto tol = [](double a, double b) { return std::abs(a - b) < 1e-14; };
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  const double xi = 0.5 * (a + b);
  const Unitary2 u = lobe_unitary(xi, tau, params);
  const double s = rotation_vector(u).norm();
  const double c = 0.5 * u.trace().real();
  return {xi, 2 * std::atan2(s, c)};
}

double min_angle(double tau, const QubitParams& params) { return min_angle_lobe(tau, params).angle; }

double tau_for_min_angle(double angle, const QubitParams& params) {
  const double tau_max = kMaxTauOverTx * params.t_x();
  if (!(angle > 0) || angle > min_angle(tau_max, params)) {
    throw DomainError("tau_for_min_angle: angle outside the reachable range");
  }
  auto f = [&](double tau) { return tau <= 0 ? -angle : min_angle(tau, params) - angle; };
  std::uintmax_t iters = 100;
  auto tol = [](double a, double b) { return std::abs(a - b) < 1e-13; };
  auto [a, b] = boost::math::tools::toms748_solve(f, 0.0, tau_max, -angle, f(tau_max), tol, iters);
  return 0.5 * (a + b);
}

std::array<double, 5> reference_taus(const QubitParams& params) {
  std::array<double, 5> out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = kReferenceTauOverTx[i] * params.t_x();
  return out;
}

double full_ramp_from_partial(double measured, double lo, double hi) {
  if (!(0 <= lo && lo < hi && hi <= 1)) throw DomainError("full_ramp_from_partial: need 0 <= lo < hi <= 1");
  return measured / ((2 / kPi) * (std::asin(hi) - std::asin(lo)));
}

SubdivisionPlan subdivide_x_fixed(double angle, int slices) {
  if (slices < 1) throw DomainError("subdivide_x: slice count must be >= 1");
  SubdivisionPlan plan;
  plan.slices = slices;
  plan.slice_angle = angle / slices;
  const double c = std::cos(plan.slice_angle / 2);
  const double t1 = std::acos(std::clamp(std::sqrt(2.0) * c / std::sqrt(c * c + 1), -1.0, 1.0));
  const double t2 = 2 * std::atan(std::sin(t1));
  std::vector<PrimitiveRotation> prims;
  for (int k = 0; k < slices; ++k) {
    prims.push_back({PrimitiveAxis::XPrime, t1});
    prims.push_back({PrimitiveAxis::ZPrime, t2});
    prims.push_back({PrimitiveAxis::XPrime, t1});
  }
  plan.primitives = simplify(prims);
  return plan;
}

SubdivisionPlan subdivide_x(double angle, double tau, const QubitParams& params) {
  if (!(angle > 0) || !std::isfinite(angle)) throw DomainError("subdivide_x: angle must be > 0");
  const double floor = min_angle(tau, params);
  if (angle < floor) {
    SubdivisionPlan plan = subdivide_x_fixed(angle, 1);
    plan.complement = true;
    return plan;
  }
  constexpr int kMaxSlices = 64;
  for (int k = kMaxSlices; k >= 1; --k) {
    SubdivisionPlan plan = subdivide_x_fixed(angle, k);
    const bool ok = std::all_of(plan.primitives.begin(), plan.primitives.end(),
                                [&](const PrimitiveRotation& p) { return p.angle >= floor - 1e-12; });
    if (ok && plan.slice_angle >= floor - 1e-12) return plan;
  }
  return subdivide_x_fixed(angle, 1);
}

nlohmann::json pulse_train_json(const std::vector<PrimitiveRotation>& prims, const std::vector<CorrectionEntry>& corr,
                                const QubitParams& params) {
  if (prims.size() != corr.size()) throw DomainError("pulse_train_json: one correction per primitive required");
  nlohmann::json arr = nlohmann::json::array();
  for (std::size_t i = 0; i < prims.size(); ++i) {
    nlohmann::json j = prims[i];
    j["xi"] = corr[i].xi;
    j["delta_t"] = corr[i].delta_t / params.t_x();
    j["tau"] = corr[i].tau / params.t_x();
    arr.push_back(j);
  }
  return arr;
}

}  // namespace dqd
