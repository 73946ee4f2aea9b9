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

#include "dqd/decomposition.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

namespace dqd {

namespace {

constexpr double kDropTol = 1e-12;

Unitary2 rotation(const BlochVector& axis, double angle) {
  return square_pulse_unitary<double>(axis, angle);
}

Unitary2 hadamard() {
  Unitary2 h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

// Maps x' onto x and z' onto z.
Unitary2 frame_to_lab() { return rotation(axis_y(), -kPi / 4); }

// Physical frame of the rotated-basis gate library.
Unitary2 rotated_frame() { return rotation(axis_y(), 3 * kPi / 4); }

DecompositionResult finish(std::vector<PrimitiveRotation> prims, SchemeTag tag) {
  return DecompositionResult{simplify(prims), tag};
}

}  // namespace

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

RotationSpec RotationSpec::make(const BlochVector& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-12) throw DomainError("RotationSpec: axis must have unit norm");
  if (!std::isfinite(angle)) throw DomainError("RotationSpec: angle must be finite");
  return RotationSpec{axis, wrap_angle(angle)};
}

double DecompositionResult::angle_sum() const {
  double s = 0;
  for (const auto& p : primitives) s += p.angle;
  return s;
}

BlochVector primitive_axis(PrimitiveAxis axis) {
  return axis == PrimitiveAxis::XPrime ? axis_x_prime<double>() : axis_z_prime<double>();
}

BlochVector lab_axis(LabAxis axis) {
  switch (axis) {
    case LabAxis::X:
      return axis_x<double>();
    case LabAxis::Y:
      return axis_y<double>();
    case LabAxis::Z:
      return axis_z<double>();
  }
  return axis_z<double>();
}

Unitary2 primitive_unitary(const PrimitiveRotation& p) { return rotation(primitive_axis(p.axis), p.angle); }

Unitary2 product_unitary(const std::vector<PrimitiveRotation>& primitives) {
  Unitary2 u = Unitary2::Identity();
  for (const auto& p : primitives) u = primitive_unitary(p) * u;
  return u;
}

Unitary2 target_unitary(const RotationSpec& spec) { return rotation(spec.axis, spec.angle); }

std::vector<PrimitiveRotation> simplify(const std::vector<PrimitiveRotation>& primitives) {
  std::vector<PrimitiveRotation> out;
  for (const auto& p : primitives) {
    if (!out.empty() && out.back().axis == p.axis) {
      out.back().angle += p.angle;
    } else {
      out.push_back(p);
    }
    out.back().angle = wrap_angle(out.back().angle);
    if (out.back().angle < kDropTol || out.back().angle > kTwoPi - kDropTol) out.pop_back();
  }
  return out;
}

DecompositionResult decompose_general_5(const RotationSpec& spec) {
  const BlochVector& n = spec.axis;
  const BlochVector m{n.x() * std::cos(kPi / 4) + n.z() * std::sin(kPi / 4), n.y(),
                      -n.x() * std::sin(kPi / 4) + n.z() * std::cos(kPi / 4)};
  const BlochVector xp = axis_x_prime<double>();
  const double theta = std::atan2(n.cross(xp).norm(), n.dot(xp));
  const double phi = (std::hypot(m.x(), m.y()) < 1e-15) ? 0.0 : std::atan2(m.y(), m.x());
  const double outer = kPi / 2 - phi;
  std::vector<PrimitiveRotation> prims{
      {PrimitiveAxis::XPrime, wrap_angle(-outer)}, {PrimitiveAxis::ZPrime, wrap_angle(-theta)},
      {PrimitiveAxis::XPrime, spec.angle},         {PrimitiveAxis::ZPrime, wrap_angle(theta)},
      {PrimitiveAxis::XPrime, wrap_angle(outer)},
  };
  return finish(std::move(prims), SchemeTag::FivePulse);
}

DecompositionResult decompose_y(double angle) {
  if (!std::isfinite(angle)) throw DomainError("decompose_y: angle must be finite");
  std::vector<PrimitiveRotation> prims;
  if (angle < 0) {
    prims = {{PrimitiveAxis::XPrime, 3 * kPi / 2},
             {PrimitiveAxis::ZPrime, wrap_angle(-angle)},
             {PrimitiveAxis::XPrime, kPi / 2}};
  } else {
    prims = {{PrimitiveAxis::ZPrime, 3 * kPi / 2},
             {PrimitiveAxis::XPrime, wrap_angle(angle)},
             {PrimitiveAxis::ZPrime, kPi / 2}};
  }
  return finish(std::move(prims), SchemeTag::ThreePulseY);
}

namespace {

std::pair<double, double> printed_theta(double alpha, bool z_form) {
  const double c = std::cos(alpha / 2);
  const double t1 = std::acos(std::clamp(std::sqrt(2.0) * c / std::sqrt(c * c + 1), -1.0, 1.0));
  const double at = std::atan(std::sin(t1));
  return {t1, z_form ? 2 * (kPi - at) : 2 * at};
}

}  // namespace

std::pair<double, double> theta_angles_xz(double alpha, LabAxis axis) {
  if (axis == LabAxis::Y) throw DomainError("theta_angles_xz: axis must be X or Z");
  if (axis == LabAxis::X) return printed_theta(alpha, false);
  return printed_theta(kTwoPi - alpha, true);
}

DecompositionResult decompose_axis(LabAxis axis, double angle) {
  if (!std::isfinite(angle)) throw DomainError("decompose_axis: angle must be finite");
  const double a = wrap_angle(angle);
  if (axis == LabAxis::Y) return decompose_y(a);
  const auto [t1, t2] = theta_angles_xz(a, axis);
  auto direct = finish({{PrimitiveAxis::XPrime, t1}, {PrimitiveAxis::ZPrime, t2}, {PrimitiveAxis::XPrime, t1}},
                       SchemeTag::ThreePulseXZ);
  if (axis == LabAxis::Z) {
    const auto [s1, s2] = printed_theta(a, true);
    auto swapped = finish({{PrimitiveAxis::ZPrime, s1}, {PrimitiveAxis::XPrime, s2}, {PrimitiveAxis::ZPrime, s1}},
                          SchemeTag::ThreePulseXZ);
    if (swapped.angle_sum() < direct.angle_sum()) return swapped;
  }
  return direct;
}

DecompositionResult decompose_axis(const RotationSpec& spec) {
  for (LabAxis ax : {LabAxis::X, LabAxis::Y, LabAxis::Z}) {
    if ((spec.axis - lab_axis(ax)).norm() < 1e-12) return decompose_axis(ax, spec.angle);
  }
  throw DomainError("decompose_axis: axis must be one of x, y, z");
}

DecompositionResult decompose_unitary_3(const Unitary2& u) {
  const Unitary2 s = frame_to_lab();
  const Unitary2 h = hadamard();
  // m = R_z(a) R_x(b) R_z(c) up to phase
  const Unitary2 m = h * s * u * s.adjoint() * h;
  const double b0 = 2 * std::atan2(std::abs(m(1, 0)), std::abs(m(0, 0)));
  const double sum = std::arg(m(1, 1)) - std::arg(m(0, 0));
  const double diff = (std::abs(m(1, 0)) > 1e-15 && std::abs(m(0, 1)) > 1e-15)
                          ? std::arg(m(1, 0)) - std::arg(m(0, 1))
                          : 0.0;
  const double a0 = (std::abs(m(0, 0)) > 1e-15) ? (sum + diff) / 2 : diff;
  const double c0 = (std::abs(m(0, 0)) > 1e-15) ? (sum - diff) / 2 : 0.0;

  DecompositionResult best;
  double best_sum = 1e300;
  bool found = false;
  for (double da : {0.0, kPi}) {
    for (double dc : {0.0, kPi}) {
      for (double sb : {1.0, -1.0}) {
        std::vector<PrimitiveRotation> prims{{PrimitiveAxis::XPrime, wrap_angle(c0 + dc)},
                                             {PrimitiveAxis::ZPrime, wrap_angle(sb * b0)},
                                             {PrimitiveAxis::XPrime, wrap_angle(a0 + da)}};
        auto cand = finish(std::move(prims), SchemeTag::ThreePulseXZ);
        if (process_fidelity(product_unitary(cand), u) < 1 - 1e-11) continue;
        if (!found || cand.angle_sum() < best_sum - 1e-12) {
          best = std::move(cand);
          best_sum = best.angle_sum();
          found = true;
        }
      }
    }
  }
  if (!found) throw DomainError("decompose_unitary_3: Euler extraction failed");
  if (best.primitives.size() <= 1) best.scheme = SchemeTag::Single;
  return best;
}

DecompositionResult decompose_general_3(const RotationSpec& spec) {
  return decompose_unitary_3(target_unitary(spec));
}

DecompositionResult prepare_state(PrepTarget target) {
  const PrimitiveAxis ax = target == PrepTarget::Zero ? PrimitiveAxis::ZPrime : PrimitiveAxis::XPrime;
  return DecompositionResult{{{ax, kPi}}, SchemeTag::Prep};
}

Gate parse_gate(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::toupper(c); });
  if (t == "X") return {GateName::X, 0};
  if (t == "Y") return {GateName::Y, 0};
  if (t == "Z") return {GateName::Z, 0};
  if (t == "H") return {GateName::H, 0};
  if (t.starts_with("PHASE(") && t.ends_with(")")) {
    try {
      return {GateName::Phase, std::stod(t.substr(6, t.size() - 7))};
    } catch (const std::exception&) {
    }
  }
  throw DomainError("unknown gate: " + std::string(text));
}

Unitary2 gate_unitary(const Gate& g, GateBasis basis) {
  Unitary2 m;
  switch (g.name) {
    case GateName::X:
      m = pauli_x<double>();
      break;
    case GateName::Y:
      m = pauli_y<double>();
      break;
    case GateName::Z:
      m = pauli_z<double>();
      break;
    case GateName::H:
      m = hadamard();
      break;
    case GateName::Phase:
      m << 1, 0, 0, std::polar(1.0, g.phi);
      break;
  }
  if (basis == GateBasis::Standard) return m;
  const Unitary2 w = rotated_frame();
  return w * m * w.adjoint();
}

DecompositionResult gate(const Gate& g, GateBasis basis) {
  if (basis == GateBasis::Rotated) {
    switch (g.name) {
      case GateName::X:
        return finish({{PrimitiveAxis::ZPrime, kPi}}, SchemeTag::Single);
      case GateName::Z:
        return finish({{PrimitiveAxis::XPrime, kPi}}, SchemeTag::Single);
      case GateName::Phase:
        return finish({{PrimitiveAxis::XPrime, wrap_angle(g.phi)}}, SchemeTag::Single);
      case GateName::Y:
        return decompose_y(kPi);
      case GateName::H: {
        auto prims = decompose_y(kPi / 2).primitives;
        prims.insert(prims.begin(), PrimitiveRotation{PrimitiveAxis::XPrime, kPi});
        return finish(std::move(prims), SchemeTag::ThreePulseY);
      }
    }
  }
  switch (g.name) {
    case GateName::X:
      return decompose_axis(LabAxis::X, kPi);
    case GateName::Y:
      return decompose_y(kPi);
    case GateName::Z:
      return decompose_axis(LabAxis::Z, kPi);
    case GateName::Phase:
      return decompose_axis(LabAxis::Z, g.phi);
    case GateName::H:
      return decompose_unitary_3(gate_unitary(g, GateBasis::Standard));
  }
  throw DomainError("unknown gate");
}

std::string_view to_string(PrimitiveAxis axis) { return axis == PrimitiveAxis::XPrime ? "XPRIME" : "ZPRIME"; }

std::string_view to_string(SchemeTag tag) {
  switch (tag) {
    case SchemeTag::FivePulse:
      return "FIVE_PULSE";
    case SchemeTag::ThreePulseY:
      return "THREE_PULSE_Y";
    case SchemeTag::ThreePulseXZ:
      return "THREE_PULSE_XZ";
    case SchemeTag::Single:
      return "SINGLE";
    case SchemeTag::Prep:
      return "PREP";
  }
  return "SINGLE";
}

PrimitiveAxis parse_primitive_axis(std::string_view text) {
  if (text == "XPRIME") return PrimitiveAxis::XPrime;
  if (text == "ZPRIME") return PrimitiveAxis::ZPrime;
  throw DomainError("unknown primitive axis: " + std::string(text));
}

void to_json(nlohmann::json& j, const PrimitiveRotation& p) {
  j = nlohmann::json{{"axis", std::string(to_string(p.axis))}, {"angle", p.angle}};
}

void from_json(const nlohmann::json& j, PrimitiveRotation& p) {
  p.axis = parse_primitive_axis(j.at("axis").get<std::string>());
  p.angle = j.at("angle").get<double>();
  if (!(p.angle > 0 && p.angle < kTwoPi)) throw DomainError("primitive angle outside (0, 2pi)");
}

nlohmann::json to_json(const DecompositionResult& r) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : r.primitives) arr.push_back(p);
  return arr;
}

DecompositionResult decomposition_from_json(const nlohmann::json& j) {
  DecompositionResult r;
  r.primitives = j.get<std::vector<PrimitiveRotation>>();
  r.scheme = r.primitives.size() == 1 ? SchemeTag::Single : SchemeTag::ThreePulseXZ;
  return r;
}

}  // namespace dqd
