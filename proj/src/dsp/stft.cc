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

#include "emoxfer/dsp/stft.h"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <string>

#include "emoxfer/core/error.h"

namespace emoxfer::dsp {

int NumFrames(size_t num_samples, const FrameConfig& cfg) {
  if (num_samples < static_cast<size_t>(cfg.frame_length)) {
    throw ShortInputError("clip has " + std::to_string(num_samples) +
                          " samples; at least one frame of " + std::to_string(cfg.frame_length) +
                          " is required");
  }
  return static_cast<int>((num_samples - cfg.frame_length) / cfg.frame_shift) + 1;
}

std::vector<double> HannWindow(int length) {
  std::vector<double> w(static_cast<size_t>(length));
  for (int i = 0; i < length; ++i) {
    w[static_cast<size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / length);
  }
  return w;
}

struct RealFft::Impl {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

RealFft::RealFft(int n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2) throw ParameterError("FFT size must be >= 2");
  impl_->real = fftw_alloc_real(static_cast<size_t>(n));
  impl_->spec = fftw_alloc_complex(static_cast<size_t>(n / 2 + 1));
  impl_->forward = fftw_plan_dft_r2c_1d(n, impl_->real, impl_->spec, FFTW_ESTIMATE);
  impl_->inverse = fftw_plan_dft_c2r_1d(n, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  fftw_destroy_plan(impl_->forward);
  fftw_destroy_plan(impl_->inverse);
  fftw_free(impl_->real);
  fftw_free(impl_->spec);
}

void RealFft::Forward(const std::vector<double>& in, std::vector<std::complex<double>>* out) {
  for (int i = 0; i < n_; ++i) {
    impl_->real[i] = static_cast<size_t>(i) < in.size() ? in[static_cast<size_t>(i)] : 0.0;
  }
  fftw_execute(impl_->forward);
  out->resize(static_cast<size_t>(n_ / 2 + 1));
  for (int k = 0; k <= n_ / 2; ++k) {
    (*out)[static_cast<size_t>(k)] = {impl_->spec[k][0], impl_->spec[k][1]};
  }
}

void RealFft::Inverse(const std::vector<std::complex<double>>& in, std::vector<double>* out) {
  for (int k = 0; k <= n_ / 2; ++k) {
    impl_->spec[k][0] = in[static_cast<size_t>(k)].real();
    impl_->spec[k][1] = in[static_cast<size_t>(k)].imag();
  }
  fftw_execute(impl_->inverse);
  out->assign(impl_->real, impl_->real + n_);
}

std::vector<std::vector<std::complex<double>>> Stft(const AudioClip& clip,
                                                    const FrameConfig& cfg) {
  ValidateClip(clip);
  const int frames = NumFrames(clip.samples.size(), cfg);
  const std::vector<double> window = HannWindow(cfg.frame_length);
  RealFft fft(cfg.n_fft);
  std::vector<std::vector<std::complex<double>>> out(static_cast<size_t>(frames));
  std::vector<double> buf(static_cast<size_t>(cfg.frame_length));
  for (int t = 0; t < frames; ++t) {
    const size_t start = static_cast<size_t>(t) * cfg.frame_shift;
    for (int i = 0; i < cfg.frame_length; ++i) {
      buf[static_cast<size_t>(i)] = clip.samples[start + i] * window[static_cast<size_t>(i)];
    }
    fft.Forward(buf, &out[static_cast<size_t>(t)]);
  }
  return out;
}

Mat StftMagnitude(const AudioClip& clip, const FrameConfig& cfg) {
  const auto spec = Stft(clip, cfg);
  Mat mag(static_cast<Eigen::Index>(spec.size()), cfg.NumBins());
  for (size_t t = 0; t < spec.size(); ++t) {
    for (int k = 0; k < cfg.NumBins(); ++k) {
      mag(static_cast<Eigen::Index>(t), k) = std::abs(spec[t][static_cast<size_t>(k)]);
    }
  }
  return mag;
}

std::vector<double> Istft(const std::vector<std::vector<std::complex<double>>>& spec,
                          const FrameConfig& cfg) {
  if (spec.empty()) return {};
  const size_t frames = spec.size();
  const size_t length = (frames - 1) * cfg.frame_shift + cfg.frame_length;
  std::vector<double> out(length, 0.0), norm(length, 0.0);
  const std::vector<double> window = HannWindow(cfg.frame_length);
  RealFft fft(cfg.n_fft);
  std::vector<double> buf;
  for (size_t t = 0; t < frames; ++t) {
    fft.Inverse(spec[t], &buf);
    const size_t start = t * cfg.frame_shift;
    for (int i = 0; i < cfg.frame_length; ++i) {
      const double w = window[static_cast<size_t>(i)];
      out[start + i] += buf[static_cast<size_t>(i)] / cfg.n_fft * w;
      norm[start + i] += w * w;
    }
  }
  for (size_t i = 0; i < length; ++i) {
    if (norm[i] > 1e-8) out[i] /= norm[i];
  }
  return out;
}

}  // namespace emoxfer::dsp
