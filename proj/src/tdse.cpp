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

#include "dqd/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace dqd::tdse {

void Grid1D::validate() const {
  if (n_points < 3) throw DomainError("Grid1D: need at least 3 points");
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    throw DomainError("Grid1D: need x_min < x_max");
  }
}

bool Grid1D::symmetric() const { return std::abs(x_min + x_max) <= 1e-12 * (x_max - x_min); }

void PotentialSpec::validate() const {
  if (!(b_height >= 0)) throw DomainError("PotentialSpec: b_height must be >= 0");
  if (!(sigma_width > 0)) throw DomainError("PotentialSpec: sigma_width must be > 0");
  if (!(half_width > 0)) throw DomainError("PotentialSpec: half_width must be > 0");
  if (!(mass_ratio > 0)) throw DomainError("PotentialSpec: mass_ratio must be > 0");
  if (!std::isfinite(a_coef) || !std::isfinite(v_bias) || !std::isfinite(asymmetry)) {
    throw DomainError("PotentialSpec: non-finite coefficient");
  }
}

// V''(0) = 2A - B / sigma.
bool PotentialSpec::double_well() const { return b_height / sigma_width > 2 * a_coef; }

double static_potential(const PotentialSpec& s, double x) {
  const double r = x / s.half_width;
  return s.a_coef * x * x + s.b_height * std::exp(-x * x / (2 * s.sigma_width)) + s.asymmetry * r * r * r;
}

double bias_profile(const PotentialSpec& s, double x) { return 1000.0 * x / (2 * s.half_width); }

double potential(const PotentialSpec& s, double x) { return static_potential(s, x) + s.v_bias * bias_profile(s, x); }

double weighted_dot(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  return dx * std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

namespace {

struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // off[i] couples i and i + 1
};

std::vector<double> multiply(const Tridiagonal& t, const std::vector<double>& x) {
  const std::size_t n = t.diag.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = t.diag[i] * x[i];
    if (i > 0) s += t.off[i - 1] * x[i - 1];
    if (i + 1 < n) s += t.off[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

// Solves (T - shift) y = x with partial pivoting.
std::vector<double> solve_shifted(const Tridiagonal& t, double shift, std::vector<double> x) {
  const std::size_t n = t.diag.size();
  std::vector<double> d(n), dl(t.off), du(t.off), fill(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
  const double tiny = std::numeric_limits<double>::epsilon() * (1 + std::abs(shift));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0) d[i] = tiny;
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      x[i + 1] -= f * x[i];
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      if (i + 2 < n) {
        fill[i] = du[i + 1];
        du[i + 1] = -f * fill[i];
      }
      du[i] = tmp;
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
    }
  }
  if (d[n - 1] == 0) d[n - 1] = tiny;
  x[n - 1] /= d[n - 1];
  if (n > 1) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) x[i] = (x[i] - du[i] * x[i + 1] - fill[i] * x[i + 2]) / d[i];
  return x;
}

double norm2(const std::vector<double>& x) { return std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)); }

struct RawPair {
  double energy;
  std::vector<double> vec;  // unit Euclidean norm
  double residual;
};

// Lowest `count` eigenpairs: QL eigenvalues, then inverse iteration with a
// Rayleigh-quotient finish.
std::vector<RawPair> lowest_pairs(const Tridiagonal& t, int count) {
  const Eigen::Index n = static_cast<Eigen::Index>(t.diag.size());
  if (count > n) throw SolverError("stationary_states: more states requested than grid unknowns");
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
  Eigen::VectorXd e = n > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(t.off.data(), n - 1))
                            : Eigen::VectorXd(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("stationary_states: tridiagonal QL did not converge");
  constexpr double kTarget = 1e-11;
  constexpr double kAccept = 1e-8;
  std::vector<RawPair> out;
  for (int k = 0; k < count; ++k) {
    const double shift = es.eigenvalues()[k];
    std::vector<double> x(n);
    // Deterministic start with weight on every component.
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i + 1) * (k + 1));
    double energy = shift, residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 12 && residual > kTarget; ++it) {
      x = solve_shifted(t, shift, std::move(x));
      for (const auto& p : out) {
        const double c = std::inner_product(x.begin(), x.end(), p.vec.begin(), 0.0);
        for (Eigen::Index i = 0; i < n; ++i) x[i] -= c * p.vec[i];
      }
      const double nx = norm2(x);
      for (double& xi : x) xi /= nx;
      const std::vector<double> hx = multiply(t, x);
      energy = std::inner_product(x.begin(), x.end(), hx.begin(), 0.0);
      double r = 0;
      for (Eigen::Index i = 0; i < n; ++i) r += (hx[i] - energy * x[i]) * (hx[i] - energy * x[i]);
      residual = std::sqrt(r);
    }
    if (!(residual < kAccept)) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "stationary_states: state %d residual %.3e above 1e-8", k, residual);
      throw SolverError(buf);
    }
    out.push_back({energy, std::move(x), residual});
  }
  return out;
}

Tridiagonal interior_hamiltonian(const PotentialSpec& spec, const Grid1D& grid) {
  const int m = grid.n_points - 2;
  const double k = spec.kinetic_scale() / (grid.dx() * grid.dx());
  Tridiagonal t{std::vector<double>(m), std::vector<double>(std::max(m - 1, 0), -k)};
  for (int i = 0; i < m; ++i) t.diag[i] = potential(spec, grid.x(i + 1)) + 2 * k;
  return t;
}

Eigenpair to_grid(const RawPair& p, int n, double dx) {
  Eigenpair e;
  e.energy = p.energy;
  e.residual = p.residual;
  e.psi.assign(n, 0.0);
  std::copy(p.vec.begin(), p.vec.end(), e.psi.begin() + 1);
  const double nrm = std::sqrt(weighted_dot(e.psi, e.psi, dx));
  for (double& v : e.psi) v /= nrm;
  return e;
}

// ||H psi - E psi|| / ||psi|| on the interior of a full-grid state.
double grid_residual(const Tridiagonal& t, const Eigenpair& e) {
  const std::vector<double> x(e.psi.begin() + 1, e.psi.end() - 1);
  const std::vector<double> hx = multiply(t, x);
  double r = 0;
  for (std::size_t i = 0; i < x.size(); ++i) r += (hx[i] - e.energy * x[i]) * (hx[i] - e.energy * x[i]);
  return std::sqrt(r) / norm2(x);
}

// Even (parity = +1) or odd sector of a mirror-symmetric problem, mapped back
// onto the full grid. The sector matrix is kept symmetric by scaling the
// centre point when one exists.
Eigenpair parity_ground(const Tridiagonal& full, int parity, int n, double dx) {
  const int m = static_cast<int>(full.diag.size());
  const double k = -full.off.front();
  Tridiagonal t;
  std::vector<int> first;  // interior index of sector element j
  if (m % 2 == 0) {
    const int h = m / 2;
    for (int j = 0; j < h; ++j) first.push_back(h + j);
    t.diag.assign(full.diag.begin() + h, full.diag.end());
    t.diag[0] -= parity * k;
    t.off.assign(h - 1, -k);
  } else {
    const int c = m / 2;
    if (parity > 0) {
      for (int j = 0; j <= c; ++j) first.push_back(c + j);
      t.diag.assign(full.diag.begin() + c, full.diag.end());
      t.off.assign(c, -k);
      if (c > 0) t.off[0] = -std::sqrt(2.0) * k;
    } else {
      for (int j = 1; j <= c; ++j) first.push_back(c + j);
      t.diag.assign(full.diag.begin() + c + 1, full.diag.end());
      t.off.assign(std::max(c - 1, 0), -k);
    }
  }
  const RawPair p = lowest_pairs(t, 1).front();
  const bool centre = m % 2 == 1 && parity > 0;
  Eigenpair e;
  e.energy = p.energy;
  e.psi.assign(n, 0.0);
  for (std::size_t j = 0; j < first.size(); ++j) {
    const int i = first[j];
    if (centre && j == 0) {
      e.psi[i + 1] = std::sqrt(2.0) * p.vec[j];
      continue;
    }
    e.psi[i + 1] = p.vec[j];
    e.psi[m - i] = parity * p.vec[j];
  }
  const double nrm = std::sqrt(weighted_dot(e.psi, e.psi, dx));
  for (double& v : e.psi) v /= nrm;
  e.residual = grid_residual(full, e);
  return e;
}

// Sign of the left-half integral; odd states use x < 0 weight.
double left_weight(const std::vector<double>& psi, const Grid1D& grid) {
  double s = 0;
  for (int i = 0; i < grid.n_points; ++i) {
    if (grid.x(i) < 0) s += psi[i];
  }
  return s;
}

}  // namespace

std::vector<Eigenpair> stationary_states(const PotentialSpec& spec, const Grid1D& grid, int k) {
  spec.validate();
  grid.validate();
  if (k < 1) throw DomainError("stationary_states: k must be >= 1");
  const Tridiagonal t = interior_hamiltonian(spec, grid);
  std::vector<Eigenpair> out;
  for (const auto& r : lowest_pairs(t, k)) out.push_back(to_grid(r, grid.n_points, grid.dx()));
  return out;
}

SpectralPair spectral_pair(const PotentialSpec& spec, const Grid1D& grid) {
  spec.validate();
  grid.validate();
  SpectralPair sp;
  sp.grid = grid;
  Eigenpair b, ab;
  if (spec.symmetric() && grid.symmetric() && grid.n_points >= 5) {
    const Tridiagonal t = interior_hamiltonian(spec, grid);
    b = parity_ground(t, +1, grid.n_points, grid.dx());
    ab = parity_ground(t, -1, grid.n_points, grid.dx());
    if (ab.energy < b.energy) std::swap(b, ab);
  } else {
    auto states = stationary_states(spec, grid, 2);
    b = std::move(states[0]);
    ab = std::move(states[1]);
  }
  if (std::accumulate(b.psi.begin(), b.psi.end(), 0.0) < 0) {
    for (double& v : b.psi) v = -v;
  }
  if (left_weight(ab.psi, grid) < 0) {
    for (double& v : ab.psi) v = -v;
  }
  sp.e_bonding = b.energy;
  sp.e_antibonding = ab.energy;
  sp.psi_bonding = std::move(b.psi);
  sp.psi_antibonding = std::move(ab.psi);
  return sp;
}

std::vector<double> SpectralPair::logical_zero() const {
  std::vector<double> out(psi_bonding.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (psi_bonding[i] + psi_antibonding[i]) / std::sqrt(2.0);
  return out;
}

std::vector<double> SpectralPair::logical_one() const {
  std::vector<double> out(psi_bonding.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (psi_bonding[i] - psi_antibonding[i]) / std::sqrt(2.0);
  return out;
}

double e_max_bound(const PotentialSpec& spec, const Grid1D& grid, double max_bias) {
  const double k = spec.kinetic_scale() / (grid.dx() * grid.dx());
  double vmax = 0;
  for (int i = 1; i + 1 < grid.n_points; ++i) {
    const double v0 = static_potential(spec, grid.x(i));
    const double s = bias_profile(spec, grid.x(i));
    vmax = std::max({vmax, std::abs(v0 + max_bias * s), std::abs(v0 - max_bias * s)});
  }
  return vmax + 4 * k;
}

double stability_limit(const PotentialSpec& spec, const Grid1D& grid, double max_bias) {
  return kHbar / e_max_bound(spec, grid, std::abs(max_bias));
}

std::vector<std::complex<double>> Wavefunction1D::psi_average() const {
  std::vector<std::complex<double>> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = {u[i], 0.5 * (v[i] + v_lag[i])};
  return out;
}

double norm(const std::vector<std::complex<double>>& psi, double dx) {
  double s = 0;
  for (const auto& z : psi) s += std::norm(z);
  return s * dx;
}

double overlap(const std::vector<std::complex<double>>& a, const std::vector<std::complex<double>>& b, double dx) {
  std::complex<double> s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return std::norm(s * dx);
}

Propagator::Propagator(const PotentialSpec& spec, const Grid1D& grid, double dt, double max_bias)
    : grid_(grid), kin_(spec.kinetic_scale() / (grid.dx() * grid.dx())), dt_(dt) {
  spec.validate();
  grid.validate();
  if (!(dt > 0) || !std::isfinite(dt)) throw DomainError("Propagator: dt must be > 0");
  const double limit = stability_limit(spec, grid, max_bias);
  if (dt > limit) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "dt = %.6e ps exceeds the stability bound hbar/E_max = %.6e ps (E_max = %.6e meV)",
                  dt, limit, kHbar / limit);
    throw StabilityError(buf);
  }
  const int n = grid.n_points;
  v0_.assign(n, 0.0);
  slope_.assign(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    v0_[i] = static_potential(spec, grid.x(i)) + 2 * kin_;
    slope_[i] = bias_profile(spec, grid.x(i));
  }
}

void Propagator::apply(const std::vector<double>& in, std::vector<double>& out, double bias) const {
  const std::size_t n = in.size();
  out.assign(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (v0_[i] + bias * slope_[i]) * in[i] - kin_ * (in[i - 1] + in[i + 1]);
  }
}

Wavefunction1D Propagator::start(const std::vector<std::complex<double>>& psi, double t0, double bias) const {
  const int n = grid_.n_points;
  if (static_cast<int>(psi.size()) != n) throw DomainError("Propagator: state does not match the grid");
  Wavefunction1D wf;
  wf.grid = grid_;
  wf.time = t0;
  wf.dt = dt_;
  wf.u.assign(n, 0.0);
  std::vector<double> im(n, 0.0);
  for (int i = 1; i + 1 < n; ++i) {
    wf.u[i] = psi[i].real();
    im[i] = psi[i].imag();
  }
  // Half steps either side of t0, centred so their mean is Im psi(t0).
  std::vector<double> hu;
  apply(wf.u, hu, bias);
  const double h = dt_ / (2 * kHbar);
  wf.v.resize(n);
  wf.v_lag.resize(n);
  for (int i = 0; i < n; ++i) {
    wf.v[i] = im[i] - h * hu[i];
    wf.v_lag[i] = im[i] + h * hu[i];
  }
  return wf;
}

std::vector<std::complex<double>> Propagator::psi(const Wavefunction1D& wf, double bias) const {
  const std::size_t n = wf.u.size();
  std::vector<double> avg(n), h1, h2;
  for (std::size_t i = 0; i < n; ++i) avg[i] = 0.5 * (wf.v[i] + wf.v_lag[i]);
  apply(avg, h1, bias);
  apply(h1, h2, bias);
  const double h = wf.dt / (2 * kHbar);
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {wf.u[i], avg[i] + 0.5 * h * h * h2[i]};
  return out;
}

void Propagator::step(Wavefunction1D& wf, double bias_mid, double bias_end) const {
  const std::size_t n = wf.u.size();
  const double c = dt_ / kHbar;
  const double k = kin_;
  double* u = wf.u.data();
  {
    const double* v = wf.v.data();
    for (std::size_t i = 1; i + 1 < n; ++i) {
      u[i] += c * ((v0_[i] + bias_mid * slope_[i]) * v[i] - k * (v[i - 1] + v[i + 1]));
    }
  }
  wf.v_lag.swap(wf.v);
  const double* vl = wf.v_lag.data();
  double* v = wf.v.data();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    v[i] = vl[i] - c * ((v0_[i] + bias_end * slope_[i]) * u[i] - k * (u[i - 1] + u[i + 1]));
  }
  wf.time += dt_;
}

Evolution evolve(const std::vector<std::complex<double>>& psi, const PotentialSpec& spec, const Grid1D& grid,
                 const BiasFunction& bias, double duration, double dt_max, double max_bias, const Snapshot& snapshot,
                 int cadence) {
  if (!(duration >= 0)) throw DomainError("evolve: duration must be >= 0");
  if (!(dt_max > 0)) throw DomainError("evolve: dt must be > 0");
  const long steps = duration > 0 ? static_cast<long>(std::ceil(duration / dt_max)) : 0;
  const double dt = steps > 0 ? std::min(duration / static_cast<double>(steps), dt_max) : dt_max;
  const Propagator prop(spec, grid, dt, max_bias);
  auto b = [&](double t) { return bias ? bias(t) : 0.0; };
  Evolution ev{prop.start(psi, 0.0, b(0.0)), {}, steps};
  if (snapshot) snapshot(0.0, prop.psi(ev.wf, b(0.0)));
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    prop.step(ev.wf, b(t + 0.5 * dt), b(t + dt));
    ev.wf.time = static_cast<double>(s + 1) * dt;
    if (snapshot && cadence > 0 && (s + 1) % cadence == 0 && s + 1 != steps) {
      snapshot(ev.wf.time, prop.psi(ev.wf, b(ev.wf.time)));
    }
  }
  ev.psi = prop.psi(ev.wf, b(ev.wf.time));
  if (snapshot && steps > 0) snapshot(ev.wf.time, ev.psi);
  return ev;
}

std::vector<std::complex<double>> real_state(const std::vector<double>& psi) {
  return {psi.begin(), psi.end()};
}

LambdaFit calibrate_lambda(const PotentialSpec& spec, const Grid1D& grid, const std::vector<double>& bias_grid) {
  spec.validate();
  if (!spec.double_well()) throw SolverError("calibrate_lambda: potential has no double well");
  if (bias_grid.empty()) throw DomainError("calibrate_lambda: empty bias grid");
  const double span = *std::max_element(bias_grid.begin(), bias_grid.end(),
                                        [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (span == 0) throw DomainError("calibrate_lambda: bias grid needs a nonzero point");
  for (double v : bias_grid) {
    const bool mirrored = std::any_of(bias_grid.begin(), bias_grid.end(),
                                      [&](double w) { return std::abs(v + w) <= 1e-12 * std::abs(span); });
    if (!mirrored) throw DomainError("calibrate_lambda: bias grid must be symmetric about zero");
  }
  PotentialSpec s = spec;
  s.v_bias = 0;
  const SpectralPair zero = spectral_pair(s, grid);
  LambdaFit fit;
  fit.delta_mev = zero.gap();
  double sxy = 0, sxx = 0;
  for (double v : bias_grid) {
    double eps = 0;
    if (v != 0) {
      s.v_bias = v;
      const auto st = stationary_states(s, grid, 2);
      const double g = st[1].energy - st[0].energy;
      eps = std::copysign(std::sqrt(std::max(g * g - fit.delta_mev * fit.delta_mev, 0.0)), v);
    }
    fit.bias.push_back(v);
    fit.eps.push_back(eps);
    sxy += eps * v;
    sxx += v * v;
  }
  fit.lambda = sxy / sxx / 1000.0;
  if (!(fit.lambda > 0)) throw SolverError("calibrate_lambda: detuning does not grow with bias");
  double worst = 0, scale = 0;
  for (std::size_t i = 0; i < fit.bias.size(); ++i) {
    worst = std::max(worst, std::abs(fit.eps[i] - 1000.0 * fit.lambda * fit.bias[i]));
    scale = std::max(scale, std::abs(fit.eps[i]));
  }
  fit.residual = worst / scale;
  return fit;
}

std::vector<double> operating_bias_grid(const PotentialSpec& spec, const Grid1D& grid, double span, int points) {
  if (!(span > 0) || points < 3) throw DomainError("operating_bias_grid: need span > 0 and at least 3 points");
  PotentialSpec s = spec;
  s.v_bias = 0;
  const double delta = spectral_pair(s, grid).gap();
  // Probe well inside the linear regime: eps about Delta / 4 at lambda = 1/2.
  const double probe = delta / (4 * 1000.0 * 0.5);
  const LambdaFit f = calibrate_lambda(s, grid, {-probe, 0.0, probe});
  const double vmax = span * delta / (1000.0 * f.lambda);
  std::vector<double> out(points);
  for (int i = 0; i < points; ++i) out[i] = vmax * (2.0 * i / (points - 1) - 1.0);
  out[(points - 1) / 2] = points % 2 == 1 ? 0.0 : out[(points - 1) / 2];
  return out;
}

Projection project_logical(const std::vector<std::complex<double>>& psi, const SpectralPair& basis) {
  const double dx = basis.grid.dx();
  const auto zero = basis.logical_zero();
  const auto one = basis.logical_one();
  std::complex<double> c0 = 0, c1 = 0;
  double total = 0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    c0 += zero[i] * psi[i];
    c1 += one[i] * psi[i];
    total += std::norm(psi[i]);
  }
  c0 *= dx;
  c1 *= dx;
  total *= dx;
  Projection p;
  p.weight = std::norm(c0) + std::norm(c1);
  p.leakage = std::max(0.0, total - p.weight);
  const double r = std::sqrt(p.weight);
  p.state = r > 0 ? QubitState(std::conj(c0) / r, std::conj(c1) / r) : QubitState(1, 0);
  return p;
}

std::vector<std::complex<double>> embed_logical(const QubitState& q, const SpectralPair& basis) {
  const auto zero = basis.logical_zero();
  const auto one = basis.logical_one();
  std::vector<std::complex<double>> out(zero.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::conj(q(0)) * zero[i] + std::conj(q(1)) * one[i];
  return out;
}

BiasFunction bias_function(const DetuningWaveform& w, const LabUnits& units) {
  return [w, units](double t_ps) { return units.volts(w(units.model_time(t_ps))); };
}

double max_abs_bias(const DetuningWaveform& w, const LabUnits& units) {
  return std::abs(units.volts(w.max_abs() + std::abs(w.offset())));
}

std::string snapshot_csv(const std::vector<std::complex<double>>& psi, const PotentialSpec& spec, const Grid1D& grid,
                         double bias) {
  PotentialSpec s = spec;
  s.v_bias = bias;
  std::ostringstream os;
  os.precision(17);
  os << "x,re,im,density,potential\n";
  for (int i = 0; i < grid.n_points; ++i) {
    os << grid.x(i) << ',' << psi[i].real() << ',' << psi[i].imag() << ',' << std::norm(psi[i]) << ','
       << potential(s, grid.x(i)) << '\n';
  }
  return os.str();
}

void to_json(nlohmann::json& j, const Grid1D& g) {
  j = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"n_points", g.n_points}};
}

void from_json(const nlohmann::json& j, Grid1D& g) {
  const Grid1D d;
  g.x_min = j.value("x_min", d.x_min);
  g.x_max = j.value("x_max", d.x_max);
  g.n_points = j.value("n_points", d.n_points);
  g.validate();
}

void to_json(nlohmann::json& j, const PotentialSpec& s) {
  j = {{"a_coef", s.a_coef},         {"b_height", s.b_height}, {"sigma_width", s.sigma_width},
       {"half_width", s.half_width}, {"v_bias", s.v_bias},     {"mass_ratio", s.mass_ratio},
       {"asymmetry", s.asymmetry}};
}

void from_json(const nlohmann::json& j, PotentialSpec& s) {
  const PotentialSpec d;
  s.a_coef = j.value("a_coef", d.a_coef);
  s.b_height = j.value("b_height", d.b_height);
  s.sigma_width = j.value("sigma_width", d.sigma_width);
  s.half_width = j.value("half_width", d.half_width);
  s.v_bias = j.value("v_bias", d.v_bias);
  s.mass_ratio = j.value("mass_ratio", d.mass_ratio);
  s.asymmetry = j.value("asymmetry", d.asymmetry);
  s.validate();
}

}  // namespace dqd::tdse
