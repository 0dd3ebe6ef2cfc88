// Copyright (c) 2026 The emoxfer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emoxfer/dsp/pitch.h"

#include <algorithm>
#include <cmath>
#include <complex>

namespace emoxfer::dsp {

std::vector<double> ExtractF0(const AudioClip& clip, const PitchConfig& cfg) {
  ValidateClip(clip);
  const int frames = NumFrames(clip.samples.size(), cfg.frame);
  const int len = cfg.frame.frame_length;
  const int min_lag = std::max(2, static_cast<int>(std::floor(cfg.frame.sample_rate / cfg.max_f0)));
  const int max_lag =
      std::min(len - 2, static_cast<int>(std::ceil(cfg.frame.sample_rate / cfg.min_f0)));

  // Linear autocorrelation through a zero-padded FFT.
  int n_fft = 1;
  while (n_fft < 2 * len) n_fft *= 2;
  RealFft fft(n_fft);
  std::vector<double> frame(static_cast<size_t>(len));
  std::vector<double> prefix(static_cast<size_t>(len) + 1);
  std::vector<std::complex<double>> spec;
  std::vector<double> acf;
  std::vector<double> r(static_cast<size_t>(max_lag) + 2, 0.0);
  std::vector<double> f0(static_cast<size_t>(frames), 0.0);

  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.frame.frame_shift;
    prefix[0] = 0.0;
    for (int i = 0; i < len; ++i) {
      frame[static_cast<size_t>(i)] = clip.samples[start + i];
      prefix[static_cast<size_t>(i) + 1] = prefix[static_cast<size_t>(i)] + frame[static_cast<size_t>(i)] * frame[static_cast<size_t>(i)];
    }
    if (prefix[static_cast<size_t>(len)] <= 1e-20) continue;
    fft.Forward(frame, &spec);
    for (auto& c : spec) c = std::norm(c);
    fft.Inverse(spec, &acf);

    for (int lag = min_lag - 1; lag <= max_lag + 1; ++lag) {
      // Energies of the two overlapping segments x[0, len-lag) and x[lag, len).
      const double e1 = prefix[static_cast<size_t>(len - lag)];
      const double e2 = prefix[static_cast<size_t>(len)] - prefix[static_cast<size_t>(lag)];
      const double denom = std::sqrt(e1 * e2);
      r[static_cast<size_t>(lag)] = denom > 1e-20 ? acf[static_cast<size_t>(lag)] / n_fft / denom : 0.0;
    }

    double best = -1.0;
    for (int lag = min_lag; lag <= max_lag; ++lag) best = std::max(best, r[static_cast<size_t>(lag)]);
    if (best < cfg.voicing_threshold) continue;

    int chosen = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      const double v = r[static_cast<size_t>(lag)];
      const bool peak = v >= r[static_cast<size_t>(lag) - 1] && v >= r[static_cast<size_t>(lag) + 1];
      if (peak && v >= cfg.octave_ratio * best) {
        chosen = lag;
        break;
      }
    }
    if (chosen < 0) continue;

    const double a = r[static_cast<size_t>(chosen) - 1];
    const double b = r[static_cast<size_t>(chosen)];
    const double c = r[static_cast<size_t>(chosen) + 1];
    const double curvature = a - 2.0 * b + c;
    double offset = 0.0;
    if (curvature < 0.0) offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
    f0[static_cast<size_t>(t)] = cfg.frame.sample_rate / (chosen + offset);
  }
  return f0;
}

std::vector<double> ExtractEnergy(const AudioClip& clip, const FrameConfig& cfg) {
  ValidateClip(clip);
  const int frames = NumFrames(clip.samples.size(), cfg);
  std::vector<double> out(static_cast<size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.frame_shift;
    double acc = 0.0;
    for (int i = 0; i < cfg.frame_length; ++i) acc += clip.samples[start + i] * clip.samples[start + i];
    const double rms = std::sqrt(acc / cfg.frame_length);
    out[static_cast<size_t>(t)] = rms > 0.0 ? std::max(kEnergyFloorDb, 20.0 * std::log10(rms)) : kEnergyFloorDb;
  }
  return out;
}

FrameProsody ExtractFrameProsody(const AudioClip& clip, const PitchConfig& cfg) {
  return {ExtractF0(clip, cfg), ExtractEnergy(clip, cfg.frame)};
}

}  // namespace emoxfer::dsp
