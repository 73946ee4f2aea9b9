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

#ifndef DQD_DECOMPOSITION_HPP
#define DQD_DECOMPOSITION_HPP

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dqd/two_level.hpp"
#include "json.hpp"

namespace dqd {

enum class PrimitiveAxis { XPrime, ZPrime };
enum class SchemeTag { FivePulse, ThreePulseY, ThreePulseXZ, Single, Prep };
enum class LabAxis { X, Y, Z };

/// A positive rotation about x' or z', realised by one square pulse.
struct PrimitiveRotation {
  PrimitiveAxis axis = PrimitiveAxis::XPrime;
  double angle = 0.0;  // (0, 2 pi)

  bool operator==(const PrimitiveRotation&) const = default;
};

struct RotationSpec {
  BlochVector axis;
  double angle;  // [0, 2 pi)

  /// Normalizes the angle into [0, 2 pi); the axis must be unit norm.
  static RotationSpec make(const BlochVector& axis, double angle);
};

/// Primitives are stored in application order: primitives[0] acts first.
struct DecompositionResult {
  std::vector<PrimitiveRotation> primitives;
  SchemeTag scheme = SchemeTag::Single;

  double angle_sum() const;
};

double wrap_angle(double angle);
BlochVector primitive_axis(PrimitiveAxis axis);
Unitary2 primitive_unitary(const PrimitiveRotation& p);
/// U_n ... U_2 U_1 for primitives in application order.
Unitary2 product_unitary(const std::vector<PrimitiveRotation>& primitives);
inline Unitary2 product_unitary(const DecompositionResult& r) { return product_unitary(r.primitives); }
Unitary2 target_unitary(const RotationSpec& spec);
BlochVector lab_axis(LabAxis axis);

/// Merges neighbours on the same axis, wraps into [0, 2 pi) and drops
/// angles within 1e-12 of a full turn.
std::vector<PrimitiveRotation> simplify(const std::vector<PrimitiveRotation>& primitives);

DecompositionResult decompose_general_5(const RotationSpec& spec);
/// Non-negative angles use R_z'(pi/2) R_x'(a) R_z'(3pi/2), negative ones the
/// swapped form.
DecompositionResult decompose_y(double angle);
/// Closed-form (theta1, theta2) with R_x'(t1) R_z'(t2) R_x'(t1) = R_axis(alpha).
std::pair<double, double> theta_angles_xz(double alpha, LabAxis axis);
/// Three-pulse rotation about a lab axis.
DecompositionResult decompose_axis(LabAxis axis, double angle);
DecompositionResult decompose_axis(const RotationSpec& spec);
/// Euler factorization R_x'(t1) R_z'(t2) R_x'(t3) of any rotation.
DecompositionResult decompose_general_3(const RotationSpec& spec);
DecompositionResult decompose_unitary_3(const Unitary2& u);

enum class PrepTarget { Zero, One };
/// Single pulse from the bonding state (|0> + |1>)/sqrt(2).
DecompositionResult prepare_state(PrepTarget target);

enum class GateName { X, Y, Z, H, Phase };
enum class GateBasis { Standard, Rotated };
struct Gate {
  GateName name = GateName::X;
  double phi = 0.0;  // only for Phase
};
Gate parse_gate(std::string_view text);
DecompositionResult gate(const Gate& g, GateBasis basis);
/// Ideal unitary a gate stands for; rotated-basis gates are conjugated into
/// the physical frame.
Unitary2 gate_unitary(const Gate& g, GateBasis basis);

std::string_view to_string(PrimitiveAxis axis);
std::string_view to_string(SchemeTag tag);
PrimitiveAxis parse_primitive_axis(std::string_view text);

void to_json(nlohmann::json& j, const PrimitiveRotation& p);
void from_json(const nlohmann::json& j, PrimitiveRotation& p);
nlohmann::json to_json(const DecompositionResult& r);
DecompositionResult decomposition_from_json(const nlohmann::json& j);

}  // namespace dqd

#endif  // DQD_DECOMPOSITION_HPP
