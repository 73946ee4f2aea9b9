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

#include "dqd/fidelity_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dqd {

std::vector<SpherePoint> fibonacci_sphere(int n) {
  if (n < 1) throw DomainError("fibonacci_sphere: need at least one point");
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<SpherePoint> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    double phi = std::fmod(golden * i, kTwoPi);
    out.push_back({std::acos(z), phi});
  }
  return out;
}

double FidelityMap::max_error() const {
  double m = 0;
  for (const auto& p : points) m = std::max(m, p.error);
  return m;
}

double FidelityMap::min_error() const {
  double m = points.empty() ? 0 : 1;
  for (const auto& p : points) m = std::min(m, p.error);
  return m;
}

FidelityMap fidelity_map(const Unitary2& realized, const Unitary2& target, const std::vector<SpherePoint>& points) {
  FidelityMap map;
  map.points.reserve(points.size());
  for (const auto& p : points) {
    const QubitState s = state_from_angles(p.theta, p.phi);
    const QubitState a = realized * s;
    const QubitState b = target * s;
    map.points.push_back({p, std::max(0.0, 1.0 - std::norm(a.dot(b)))});
  }
  return map;
}

std::string fidelity_map_csv(const FidelityMap& map) {
  std::ostringstream os;
  os.precision(17);
  os << "theta,phi,error\n";
  for (const auto& p : map.points) os << p.at.theta << ',' << p.at.phi << ',' << p.error << '\n';
  return os.str();
}

}  // namespace dqd
