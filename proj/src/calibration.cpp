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

#include "dqd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <sstream>

// pchip.hpp uses unqualified isnan.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

namespace dqd {

namespace {

constexpr double kKeyTol = 1e-9;
constexpr double kXiFloor = 1e-3;

bool same(double a, double b) { return std::abs(a - b) <= kKeyTol * std::max(1.0, std::abs(a)); }

// Smallest delta_t that keeps the flat top non-negative.
double delta_t_floor(double tau, double angle, const QubitParams& params) {
  return 2 * tau - square_duration(angle, params);
}

Unitary2 pulse_unitary(double xi, double delta_t, double tau, double angle, PrimitiveAxis axis,
                       const QubitParams& params) {
  double flat = square_duration(angle, params) + delta_t - 2 * tau;
  if (flat < -1e-12) throw DomainError("objective: delta_t leaves a negative flat top");
  PulseSegment seg{xi * primitive_amplitude(axis, params), std::max(flat, 0.0), RiseSpec{tau, RampShape::Sine}};
  return realized_unitary(segment_waveform(seg), params);
}

}  // namespace

void AscentConfig::validate() const {
  if (max_evals < 1000) throw DomainError("AscentConfig: max_evals must be >= 1000");
  if (!(shrink > 0 && shrink < 1)) throw DomainError("AscentConfig: shrink must be in (0, 1)");
  if (!(step_xi > 0 && step_dt > 0 && h_xi > 0 && h_dt > 0)) throw DomainError("AscentConfig: steps must be > 0");
  if (!(tolerance > 0 && accept > 0)) throw DomainError("AscentConfig: tolerances must be > 0");
}

double objective(double xi, double delta_t, double tau, double angle, const QubitParams& params) {
  if (!(xi > 0)) throw DomainError("objective: xi must be > 0");
  const Unitary2 u = pulse_unitary(xi, delta_t, tau, angle, PrimitiveAxis::XPrime, params);
  return process_fidelity(u, square_pulse_unitary<double>(axis_x_prime(), angle));
}

double entry_fidelity(const CorrectionEntry& e, PrimitiveAxis axis, const QubitParams& params) {
  const double angle = e.realized_angle();
  const Unitary2 u = pulse_unitary(e.xi, e.delta_t, e.tau, e.target_angle, axis, params);
  return process_fidelity(u, square_pulse_unitary<double>(primitive_axis(axis), angle));
}

CalibrationResult calibrate_point(double tau, double angle, const QubitParams& params, const AscentConfig& cfg,
                                  bool complement, std::optional<StartPoint> start) {
  cfg.validate();
  params.validate();
  if (tau < 0 || !(angle > 0) || !std::isfinite(angle)) throw DomainError("calibrate_point: need tau >= 0, angle > 0");
  CalibrationResult res;
  res.entry.tau = tau;
  res.entry.target_angle = angle;
  res.entry.complement = complement;
  if (tau == 0) {
    res.entry.xi = 1;
    res.entry.delta_t = 0;
    res.entry.residual_error = 1 - objective(1, 0, 0, angle, params);
    res.converged = true;
    res.evaluations = 1;
    return res;
  }
  if (!complement && angle < min_angle(tau, params) - 1e-9) {
    res.message = "angle below the minimum for this rise time";
    res.entry.residual_error = 1;
    return res;
  }
  // A complement pulse differs from the direct one only by a full flat-top
  // turn, which process fidelity cannot see. delta_t is therefore always
  // measured from the square duration of `angle`; the cold start of a
  // complement point sits one extra turn out.
  const double target = angle;
  const double lo_dt = delta_t_floor(tau, target, params);
  const double extra_turn = complement ? square_duration(kTwoPi, params) : 0.0;
  const double tx = params.t_x();
  const double hx = cfg.h_xi, hd = cfg.h_dt * tx;
  const double max_dx = cfg.step_xi, max_dd = cfg.step_dt * tx;

  auto f = [&](double xi, double dt) {
    ++res.evaluations;
    return objective(xi, dt, tau, target, params);
  };
  auto project = [&](double& xi, double& dt) {
    xi = std::max(xi, kXiFloor);
    dt = std::max(dt, lo_dt);
  };

  double xi = start ? start->xi : 1.0;
  double dt = start ? start->delta_t : 0.5 * tau + extra_turn;
  if (!start && std::abs(res.entry.realized_angle() - kTwoPi) < 1e-9) {
    // A full turn is -I, which idling for one free period gives exactly; the
    // square-pulse start is a singular point here.
    xi = kXiFloor;
    dt = tx - square_duration(kTwoPi, params);
  }
  project(xi, dt);
  double fx = f(xi, dt);

  while (true) {
    if (1 - fx < cfg.tolerance) {
      res.converged = true;
      break;
    }
    if (res.evaluations + 10 > cfg.max_evals) {
      res.message = "evaluation budget exhausted";
      break;
    }
    // Central differences, one-sided against the flat-top floor.
    const double fxp = f(xi + hx, dt), fxm = f(std::max(xi - hx, 1e-4), dt);
    const double gx = (fxp - fxm) / (2 * hx);
    const double hxx = (fxp - 2 * fx + fxm) / (hx * hx);
    double gd, hdd;
    const double fdp = f(xi, dt + hd);
    if (dt - hd >= lo_dt) {
      const double fdm = f(xi, dt - hd);
      gd = (fdp - fdm) / (2 * hd);
      hdd = (fdp - 2 * fx + fdm) / (hd * hd);
    } else {
      const double fdp2 = f(xi, dt + 2 * hd);
      gd = (-3 * fx + 4 * fdp - fdp2) / (2 * hd);
      hdd = (fx - 2 * fdp + fdp2) / (hd * hd);
    }
    const double fpp = f(xi + hx, dt + hd);
    const double hxd = (fpp - fxp - fdp + fx) / (hx * hd);

    // Newton-preconditioned ascent direction; plain gradient if the local
    // model is not concave.
    double sx, sd;
    const double det = hxx * hdd - hxd * hxd;
    const bool at_floor = dt <= lo_dt + 1e-15;
    if (hxx < 0 && hdd < 0 && det > 0) {
      sx = -(hdd * gx - hxd * gd) / det;
      sd = -(-hxd * gx + hxx * gd) / det;
      if (at_floor && sd < 0) {
        sx = -gx / hxx;
        sd = 0;
      }
    } else {
      sx = gx * max_dx * max_dx;
      sd = gd * max_dd * max_dd;
      if (at_floor && sd < 0) sd = 0;
    }
    const double scale = std::max({1.0, std::abs(sx) / max_dx, std::abs(sd) / max_dd});
    sx /= scale;
    sd /= scale;

    double t = 1;
    bool moved = false;
    double nxi = xi, ndt = dt, nf = fx;
    while (std::abs(t * sx) >= cfg.min_step || std::abs(t * sd) >= cfg.min_step) {
      nxi = xi + t * sx;
      ndt = dt + t * sd;
      project(nxi, ndt);
      nf = f(nxi, ndt);
      if (nf > fx) {
        moved = true;
        break;
      }
      t *= cfg.shrink;
      if (res.evaluations + 10 > cfg.max_evals) break;
    }
    if (!moved) {
      res.converged = true;
      res.message = "step below resolution";
      break;
    }
    const bool tiny = std::abs(nxi - xi) < cfg.min_step && std::abs(ndt - dt) < cfg.min_step;
    xi = nxi;
    dt = ndt;
    fx = nf;
    if (tiny) {
      res.converged = true;
      break;
    }
  }
  res.entry.xi = xi;
  res.entry.delta_t = dt;
  res.entry.residual_error = std::max(0.0, 1 - fx);
  if (res.entry.residual_error >= cfg.accept) {
    res.converged = false;
    if (res.message.empty() || res.message == "step below resolution") res.message = "residual above acceptance";
  }
  return res;
}

void CalibrationTable::insert(const CorrectionEntry& e) {
  if (!(e.residual_error < accept_)) throw DomainError("CalibrationTable: entry residual above acceptance");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), e, [](const CorrectionEntry& a, const CorrectionEntry& b) {
    if (!same(a.tau, b.tau)) return a.tau < b.tau;
    return a.target_angle < b.target_angle && !same(a.target_angle, b.target_angle);
  });
  if (it != entries_.end() && same(it->tau, e.tau) && same(it->target_angle, e.target_angle)) {
    *it = e;
  } else {
    entries_.insert(it, e);
  }
}

const CorrectionEntry* CalibrationTable::find(double tau, double angle) const {
  for (const auto& e : entries_) {
    if (same(e.tau, tau) && same(e.target_angle, angle)) return &e;
  }
  return nullptr;
}

std::vector<CorrectionEntry> CalibrationTable::line(double tau) const {
  std::vector<CorrectionEntry> out;
  for (const auto& e : entries_) {
    if (same(e.tau, tau)) out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const CorrectionEntry& a, const CorrectionEntry& b) { return a.realized_angle() < b.realized_angle(); });
  return out;
}

std::vector<double> CalibrationTable::taus() const {
  std::vector<double> out;
  for (const auto& e : entries_) {
    if (out.empty() || !same(out.back(), e.tau)) out.push_back(e.tau);
  }
  return out;
}

nlohmann::json CalibrationTable::to_json() const {
  const double tx = params_.t_x();
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["time_unit"] = "t_x";
  j["params"] = {{"delta", params_.delta}, {"lambda", params_.lambda}, {"delta_si_ev", params_.delta_si_ev}};
  j["accept"] = accept_;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries_) {
    j["entries"].push_back({{"tau", e.tau / tx},
                            {"angle", e.target_angle},
                            {"xi", e.xi},
                            {"delta_t", e.delta_t / tx},
                            {"residual", e.residual_error},
                            {"complement", e.complement}});
  }
  return j;
}

CalibrationTable CalibrationTable::from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != kSchemaVersion) throw DomainError("calibration table: schema mismatch");
  QubitParams p;
  p.delta = j.at("params").at("delta").get<double>();
  p.lambda = j.at("params").at("lambda").get<double>();
  p.delta_si_ev = j.at("params").value("delta_si_ev", p.delta_si_ev);
  p.validate();
  CalibrationTable t(p, j.at("accept").get<double>());
  const double tx = p.t_x();
  for (const auto& e : j.at("entries")) {
    CorrectionEntry c;
    c.tau = e.at("tau").get<double>() * tx;
    c.target_angle = e.at("angle").get<double>();
    c.xi = e.at("xi").get<double>();
    c.delta_t = e.at("delta_t").get<double>() * tx;
    c.residual_error = e.at("residual").get<double>();
    c.complement = e.value("complement", false);
    t.insert(c);
  }
  return t;
}

std::string CalibrationTable::to_csv() const {
  const double tx = params_.t_x();
  std::ostringstream os;
  os.precision(17);
  os << "tau,angle,xi,delta_t,residual\n";
  for (const auto& e : entries_) {
    os << e.tau / tx << ',' << e.target_angle << ',' << e.xi << ',' << e.delta_t / tx << ',' << e.residual_error
       << '\n';
  }
  return os.str();
}

std::vector<std::string> trend_violations(const std::vector<CorrectionEntry>& line) {
  std::vector<std::string> out;
  std::vector<CorrectionEntry> direct;
  for (const auto& e : line) {
    if (!e.complement) direct.push_back(e);
  }
  std::sort(direct.begin(), direct.end(),
            [](const CorrectionEntry& a, const CorrectionEntry& b) { return a.target_angle < b.target_angle; });
  for (std::size_t i = 1; i < direct.size(); ++i) {
    if (direct[i].delta_t < direct[i - 1].delta_t) {
      std::ostringstream os;
      os.precision(6);
      os << "delta_t decreases at tau=" << direct[i].tau << " between angles " << direct[i - 1].target_angle
         << " and " << direct[i].target_angle;
      out.push_back(os.str());
    }
  }
  return out;
}

namespace {

struct LineResult {
  std::vector<CorrectionEntry> ok;
  std::vector<CalibrationResult> failed;
};

// Best point of a coarse log-xi by delta_t grid; a last-resort start for
// points whose optimum sits far from both neighbours.
StartPoint coarse_seed(double tau, double angle, const QubitParams& params) {
  constexpr int kXi = 80, kDt = 50;
  constexpr double kXiLo = 0.05, kXiHi = 40;
  const double lo = std::max(delta_t_floor(tau, angle, params), 0.0);
  StartPoint best{1.0, lo};
  double fbest = -1;
  for (int i = 0; i < kXi; ++i) {
    const double xi = kXiLo * std::pow(kXiHi / kXiLo, i / double(kXi - 1));
    for (int j = 0; j < kDt; ++j) {
      const double dt = lo + params.t_x() * j / double(kDt - 1);
      const double f = objective(xi, dt, tau, angle, params);
      if (f > fbest) {
        fbest = f;
        best = {xi, dt};
      }
    }
  }
  return best;
}

LineResult calibrate_line(double tau, const std::vector<double>& angles, const QubitParams& params,
                          const AscentConfig& cfg) {
  const double floor = tau > 0 ? min_angle(tau, params) : 0.0;
  struct Job {
    double angle;
    bool complement;
    double realized() const { return complement ? angle + kTwoPi : angle; }
  };
  // Direct points by increasing angle, then complement points by decreasing
  // angle; the two chains are warm-started separately.
  std::vector<Job> jobs;
  for (double a : angles) jobs.push_back({a, a < floor - 1e-9});
  std::stable_sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    if (a.complement != b.complement) return !a.complement;
    return a.complement ? a.angle > b.angle : a.angle < b.angle;
  });
  LineResult out;
  // Warm starts carry delta_t from the realised square duration.
  const double turn = square_duration(kTwoPi, params);
  std::optional<StartPoint> warm;
  bool in_complement = false;
  for (const auto& job : jobs) {
    if (job.complement && !in_complement) {
      in_complement = true;
      warm.reset();
    }
    std::optional<StartPoint> start = warm;
    if (start && job.complement) start->delta_t += turn;
    CalibrationResult r = calibrate_point(tau, job.angle, params, cfg, job.complement, start);
    if (!r.converged && warm) {
      // Retry cold before giving up on a point.
      CalibrationResult cold = calibrate_point(tau, job.angle, params, cfg, job.complement);
      if (cold.entry.residual_error < r.entry.residual_error) r = cold;
    }
    if (!r.converged) {
      CalibrationResult seeded = calibrate_point(tau, job.angle, params, cfg, job.complement,
                                                 coarse_seed(tau, job.angle, params));
      if (seeded.entry.residual_error < r.entry.residual_error) r = seeded;
    }
    if (r.entry.residual_error < cfg.accept) {
      out.ok.push_back(r.entry);
      warm = StartPoint{r.entry.xi, r.entry.complement ? r.entry.delta_t - turn : r.entry.delta_t};
    } else {
      out.failed.push_back(r);
    }
  }
  return out;
}

}  // namespace

BuildReport build_table(const std::vector<double>& taus, const std::vector<double>& angles, const QubitParams& params,
                        const AscentConfig& cfg, int threads) {
  if (taus.empty() || angles.empty()) throw DomainError("build_table: grids must be nonempty");
  cfg.validate();
  std::vector<LineResult> lines(taus.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < taus.size(); ++i) lines[i] = calibrate_line(taus[i], angles, params, cfg);
  } else {
    std::vector<std::future<LineResult>> pending;
    std::size_t next = 0;
    while (next < taus.size()) {
      pending.clear();
      const std::size_t first = next;
      for (int t = 0; t < threads && next < taus.size(); ++t, ++next) {
        pending.push_back(std::async(std::launch::async, calibrate_line, taus[next], std::cref(angles),
                                     std::cref(params), std::cref(cfg)));
      }
      for (std::size_t k = 0; k < pending.size(); ++k) lines[first + k] = pending[k].get();
    }
  }
  BuildReport rep{CalibrationTable(params, cfg.accept), {}, {}};
  for (std::size_t i = 0; i < taus.size(); ++i) {
    for (const auto& e : lines[i].ok) rep.table.insert(e);
    for (auto& f : lines[i].failed) rep.failures.push_back(std::move(f));
    auto w = trend_violations(rep.table.line(taus[i]));
    rep.warnings.insert(rep.warnings.end(), w.begin(), w.end());
  }
  return rep;
}

CorrectionEntry resolve_entry(const CalibrationTable& table, double tau, double angle, const AscentConfig& cfg) {
  const QubitParams& params = table.params();
  if (tau == 0) return CorrectionEntry{0.0, angle, 1.0, 0.0, 0.0, false};
  if (const CorrectionEntry* e = table.find(tau, angle)) return *e;
  std::ostringstream hole;
  hole.precision(9);
  hole << "no calibration for (tau=" << tau / params.t_x() << " t_x, angle=" << angle << ")";
  auto line = table.line(tau);
  if (line.empty()) throw LookupError(hole.str());
  const bool complement = angle < min_angle(tau, params) - 1e-9;
  const double realized = complement ? angle + kTwoPi : angle;
  if (realized < line.front().realized_angle() - 1e-9 || realized > line.back().realized_angle() + 1e-9) {
    throw LookupError(hole.str() + ": outside the tabulated angle range");
  }
  // Interpolate in the realised angle with delta_t measured from the
  // realised square duration, which is smooth across the 2 pi seam.
  const double turn = square_duration(kTwoPi, params);
  std::vector<double> xs, xis, dts;
  for (const auto& e : line) {
    if (!xs.empty() && e.realized_angle() <= xs.back() + 1e-12) continue;
    xs.push_back(e.realized_angle());
    xis.push_back(e.xi);
    dts.push_back(e.complement ? e.delta_t - turn : e.delta_t);
  }
  StartPoint guess{};
  if (xs.size() >= 4) {
    using boost::math::interpolators::pchip;
    auto xs2 = xs;
    auto xs3 = xs;
    pchip<std::vector<double>> ixi(std::move(xs2), std::move(xis));
    pchip<std::vector<double>> idt(std::move(xs3), std::move(dts));
    guess = {ixi(realized), idt(realized)};
  } else if (xs.size() >= 2) {
    auto k = std::min<std::size_t>(
        std::max<std::size_t>(1, std::lower_bound(xs.begin(), xs.end(), realized) - xs.begin()), xs.size() - 1);
    const double w = (realized - xs[k - 1]) / (xs[k] - xs[k - 1]);
    guess = {xis[k - 1] + w * (xis[k] - xis[k - 1]), dts[k - 1] + w * (dts[k] - dts[k - 1])};
  } else {
    guess = {xis[0], dts[0]};
  }
  if (complement) guess.delta_t += turn;
  guess.delta_t = std::max(guess.delta_t, delta_t_floor(tau, angle, params));
  CorrectionEntry e{tau, angle, guess.xi, guess.delta_t, 0.0, complement};
  e.residual_error = 1 - objective(e.xi, e.delta_t, tau, angle, params);
  // Interpolated entries are trusted only well inside the acceptance.
  if (e.residual_error < cfg.tolerance * 100) return e;
  CalibrationResult r = calibrate_point(tau, angle, params, cfg, complement, guess);
  if (r.entry.residual_error >= cfg.accept) throw LookupError(hole.str() + ": re-optimisation failed");
  return r.entry;
}

std::vector<CorrectionEntry> train_corrections(const DecompositionResult& r, const RiseSpec& rise,
                                               const CalibrationTable& table, const AscentConfig& cfg) {
  std::vector<CorrectionEntry> out;
  std::map<double, CorrectionEntry> cache;
  for (const auto& p : r.primitives) {
    auto it = cache.find(p.angle);
    if (it == cache.end()) it = cache.emplace(p.angle, resolve_entry(table, rise.tau, p.angle, cfg)).first;
    out.push_back(it->second);
  }
  return out;
}

DetuningWaveform train_waveform(const DecompositionResult& r, const RiseSpec& rise, const CalibrationTable& table,
                                const QubitParams& params, const AscentConfig& cfg) {
  DetuningWaveform w;
  if (rise.tau == 0) {
    for (const auto& p : r.primitives) w.append(square_waveform(p, params));
    return w;
  }
  auto corr = train_corrections(r, rise, table, cfg);
  for (std::size_t i = 0; i < r.primitives.size(); ++i) w.append(ramped_waveform(r.primitives[i], rise, corr[i], params));
  return w;
}

}  // namespace dqd
