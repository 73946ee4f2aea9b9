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

#include "dqd/readout.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/minima.hpp>

namespace dqd {

using tdse::Grid1D;

namespace {

// Point weights for a half-line integral right of `split`.
template <typename F>
double right_sum(const Grid1D& g, double split, F&& f) {
  double s = 0;
  for (int i = 0; i < g.n_points; ++i) {
    const double x = g.x(i);
    if (x > split) s += f(i);
    else if (x == split) s += 0.5 * f(i);
  }
  return s * g.dx();
}

}  // namespace

double ReadoutCalibration::error_bound() const { return std::abs(eta) / (p1r - p0r); }

double ReadoutEstimate::beta_sq_clamped() const { return std::clamp(beta_sq, 0.0, 1.0); }
double ReadoutEstimate::alpha_sq_clamped() const { return std::clamp(alpha_sq, 0.0, 1.0); }

double dot_boundary(const tdse::PotentialSpec& spec, const Grid1D& grid) {
  if (spec.symmetric() && grid.symmetric()) return 0.0;
  int best = -1;
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double v = tdse::potential(spec, grid.x(i));
    if (v > tdse::potential(spec, grid.x(i - 1)) && v >= tdse::potential(spec, grid.x(i + 1))) {
      if (best < 0 || std::abs(grid.x(i)) < std::abs(grid.x(best))) best = i;
    }
  }
  if (best < 0) throw DomainError("dot_boundary: potential has no barrier");
  auto neg = [&](double x) { return -tdse::potential(spec, x); };
  return boost::math::tools::brent_find_minima(neg, grid.x(best - 1), grid.x(best + 1), 40).first;
}

ReadoutCalibration calibrate_readout(const tdse::SpectralPair& basis, double split) {
  const auto f0 = basis.logical_zero();
  const auto f1 = basis.logical_one();
  const Grid1D& g = basis.grid;
  ReadoutCalibration c;
  c.split = split;
  c.p0r = right_sum(g, split, [&](int i) { return f0[i] * f0[i]; });
  c.p1r = right_sum(g, split, [&](int i) { return f1[i] * f1[i]; });
  c.eta = right_sum(g, split, [&](int i) { return f0[i] * f1[i]; });
  c.eta_left = tdse::weighted_dot(f0, f1, g.dx()) - c.eta;
  return c;
}

double measure_p_right(const std::vector<std::complex<double>>& psi, const Grid1D& grid, double split) {
  const double right = right_sum(grid, split, [&](int i) { return std::norm(psi[i]); });
  return right / tdse::norm(psi, grid.dx());
}

double predicted_p_right(const QubitState& q, const ReadoutCalibration& cal) {
  return std::norm(q(0)) * cal.p0r + std::norm(q(1)) * cal.p1r + 2 * cal.eta * (std::conj(q(0)) * q(1)).real();
}

ReadoutEstimate estimate_amplitudes(double p_right, const ReadoutCalibration& cal) {
  const double span = cal.p1r - cal.p0r;
  if (!(std::abs(span) > 1e-12)) throw DomainError("estimate_amplitudes: degenerate calibration (P_1R = P_0R)");
  ReadoutEstimate e;
  e.beta_sq = (p_right - cal.p0r) / span;
  e.alpha_sq = (cal.p1r - p_right) / span;
  e.error_bound = cal.error_bound();
  e.clamped = e.beta_sq < 0 || e.beta_sq > 1;
  return e;
}

void to_json(nlohmann::json& j, const ReadoutCalibration& c) {
  j = {{"p0r", c.p0r}, {"p1r", c.p1r}, {"eta", c.eta}, {"eta_left", c.eta_left}, {"split_nm", c.split},
       {"error_bound", c.error_bound()}};
}

void to_json(nlohmann::json& j, const ReadoutEstimate& e) {
  j = {{"beta_sq", e.beta_sq},
       {"alpha_sq", e.alpha_sq},
       {"beta_sq_clamped", e.beta_sq_clamped()},
       {"alpha_sq_clamped", e.alpha_sq_clamped()},
       {"clamped", e.clamped},
       {"error_bound", e.error_bound}};
}

}  // namespace dqd
