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

#include "dqd/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <thread>

namespace dqd {

void NoiseModel::validate() const {
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw DomainError("NoiseModel: sigma must be >= 0");
  if (n_samples < 1) throw DomainError("NoiseModel: n_samples must be >= 1");
}

double NormalStream::uniform() {
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double a = 2.0 * kPi * uniform();
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

std::vector<double> draw_offsets(const NoiseModel& model, const QubitParams& params) {
  model.validate();
  NormalStream gen(model.seed);
  std::vector<double> out(model.n_samples);
  for (double& d : out) d = model.sigma * params.delta * gen.next();
  return out;
}

namespace {

NoiseReport run_samples(const DetuningWaveform& w, const NoiseModel& model, const QubitParams& params, int threads,
                        const std::function<double(const DetuningWaveform&)>& score) {
  params.validate();
  NoiseReport rep;
  rep.model = model;
  rep.offsets = draw_offsets(model, params);
  rep.noiseless_fidelity = score(w);
  const int n = model.n_samples;
  rep.fidelities.assign(n, 0.0);
  auto work = [&](int first) {
    for (int i = first; i < n; i += std::max(threads, 1)) {
      rep.fidelities[i] = rep.offsets[i] == 0 ? rep.noiseless_fidelity : score(w.with_offset(rep.offsets[i]));
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  // Accumulate deviations from the noiseless value so sigma = 0 returns it
  // bit for bit.
  double dev = 0;
  for (double f : rep.fidelities) dev += f - rep.noiseless_fidelity;
  rep.mean_fidelity = rep.noiseless_fidelity + dev / n;
  double ss = 0;
  for (double f : rep.fidelities) ss += (f - rep.mean_fidelity) * (f - rep.mean_fidelity);
  rep.std_error = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return rep;
}

GainPoint compare(const DetuningWaveform& plain, const DetuningWaveform& split, const Unitary2& target,
                  double sigma, const NoiseModel& model, const QubitParams& params, int threads) {
  GainPoint g;
  g.sigma = sigma;
  if (sigma == 0) return g;
  NoiseModel m = model;
  m.sigma = sigma;
  const NoiseReport a = run_noisy(plain, target, m, params, threads);
  const NoiseReport b = run_noisy(split, target, m, params, threads);
  g.error_base = a.mean_error();
  g.error_variant = b.mean_error();
  g.std_error_base = a.std_error;
  g.std_error_variant = b.std_error;
  g.gain = g.error_base / g.error_variant;
  g.gain_std_error = g.gain * std::hypot(a.std_error / g.error_base, b.std_error / g.error_variant);
  return g;
}

DetuningWaveform build(const DecompositionResult& r, double tau, const CalibrationTable& table,
                       const QubitParams& params, const AscentConfig& cfg) {
  return train_waveform(r, RiseSpec{tau}, table, params, cfg);
}

}  // namespace

NoiseReport run_noisy(const DetuningWaveform& w, const Unitary2& target, const NoiseModel& model,
                      const QubitParams& params, int threads) {
  return run_samples(w, model, params, threads, [&](const DetuningWaveform& x) {
    return process_fidelity(realized_unitary(x, params), target);
  });
}

NoiseReport run_noisy(const DetuningWaveform& w, const QubitState& in, const QubitState& out,
                      const NoiseModel& model, const QubitParams& params, int threads) {
  return run_samples(w, model, params, threads, [&](const DetuningWaveform& x) {
    return state_fidelity(propagate(in, x, params), out);
  });
}

std::vector<GainPoint> pulse_comparison(const DecompositionResult& r, double tau, const std::vector<double>& sigmas,
                                        const NoiseModel& model, const CalibrationTable& table,
                                        const QubitParams& params, const AscentConfig& cfg, int threads) {
  const DetuningWaveform square = build(r, 0.0, table, params, cfg);
  const DetuningWaveform corrected = build(r, tau, table, params, cfg);
  const Unitary2 target = product_unitary(r);
  std::vector<GainPoint> out;
  for (double s : sigmas) out.push_back(compare(square, corrected, target, s, model, params, threads));
  return out;
}

std::vector<GainPoint> subdivision_gain(double angle, double tau, const std::vector<double>& sigmas,
                                        const NoiseModel& model, const CalibrationTable& table,
                                        const QubitParams& params, const AscentConfig& cfg, int threads) {
  const SubdivisionPlan plan = subdivide_x(angle, tau, params);
  if (plan.slices < 2) throw DomainError("subdivision_gain: rotation cannot be split at this rise time");
  const DecompositionResult plain = decompose_axis(LabAxis::X, angle);
  const DecompositionResult split{plan.primitives, SchemeTag::ThreePulseXZ};
  const DetuningWaveform wp = build(plain, tau, table, params, cfg);
  const DetuningWaveform ws = build(split, tau, table, params, cfg);
  const Unitary2 target = target_unitary(RotationSpec::make(axis_x<double>(), angle));
  std::vector<GainPoint> out;
  for (double s : sigmas) out.push_back(compare(wp, ws, target, s, model, params, threads));
  return out;
}

std::vector<GainPoint> z_split_gain(double angle, int slices, double tau, const std::vector<double>& sigmas,
                                    const NoiseModel& model, const CalibrationTable& table,
                                    const QubitParams& params, const AscentConfig& cfg, int threads) {
  if (slices < 2) throw DomainError("z_split_gain: need at least 2 slices");
  const DecompositionResult plain = decompose_axis(LabAxis::Z, angle);
  const DecompositionResult one = decompose_axis(LabAxis::Z, angle / slices);
  DecompositionResult split{{}, SchemeTag::ThreePulseXZ};
  for (int k = 0; k < slices; ++k) split.primitives.insert(split.primitives.end(), one.primitives.begin(), one.primitives.end());
  split.primitives = simplify(split.primitives);
  const DetuningWaveform wp = build(plain, tau, table, params, cfg);
  const DetuningWaveform ws = build(split, tau, table, params, cfg);
  const Unitary2 target = target_unitary(RotationSpec::make(axis_z<double>(), angle));
  std::vector<GainPoint> out;
  for (double s : sigmas) out.push_back(compare(wp, ws, target, s, model, params, threads));
  return out;
}

std::string gain_csv(const std::vector<GainPoint>& points) {
  std::ostringstream os;
  os.precision(17);
  os << "sigma,err_square,err_corrected,gain,stderr\n";
  for (const auto& p : points) {
    os << p.sigma << ',' << p.error_base << ',' << p.error_variant << ',' << p.gain << ',' << p.gain_std_error << '\n';
  }
  return os.str();
}

}  // namespace dqd
