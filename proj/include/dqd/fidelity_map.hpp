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

#ifndef DQD_FIDELITY_MAP_HPP
#define DQD_FIDELITY_MAP_HPP

#include <string>
#include <vector>

#include "dqd/two_level.hpp"

namespace dqd {

struct SpherePoint {
  double theta = 0;  // polar angle from |0>
  double phi = 0;    // [0, 2 pi)
};

/// Golden-angle spiral with n points at equal-area latitudes.
std::vector<SpherePoint> fibonacci_sphere(int n);

struct MapPoint {
  SpherePoint at;
  double error = 0;  // 1 - state fidelity
};

struct FidelityMap {
  std::vector<MapPoint> points;  // input order
  double max_error() const;
  double min_error() const;
};

/// State error of `realized` against `target` for every point. Both act
/// linearly, so one unitary per map stands in for per-state propagation.
FidelityMap fidelity_map(const Unitary2& realized, const Unitary2& target, const std::vector<SpherePoint>& points);

/// theta,phi,error
std::string fidelity_map_csv(const FidelityMap& map);

}  // namespace dqd

#endif  // DQD_FIDELITY_MAP_HPP
