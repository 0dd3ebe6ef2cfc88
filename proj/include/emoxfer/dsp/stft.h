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

#ifndef EMOXFER_DSP_STFT_H_
#define EMOXFER_DSP_STFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

#include "emoxfer/core/tensor.h"
#include "emoxfer/dsp/audio.h"

namespace emoxfer::dsp {

// Framing shared by the mel, F0 and energy extractors: 50 ms frames with a
// 12.5 ms shift at 16 kHz, no centre padding.
struct FrameConfig {
  int sample_rate = kSampleRate;
  int frame_length = 800;
  int frame_shift = 200;
  int n_fft = 1024;

  int NumBins() const { return n_fft / 2 + 1; }
  double FrameShiftMs() const { return 1000.0 * frame_shift / sample_rate; }
  double FrameLengthMs() const { return 1000.0 * frame_length / sample_rate; }
};

// floor((n - frame_length) / frame_shift) + 1. Throws ShortInputError when
// fewer than frame_length samples are available.
int NumFrames(size_t num_samples, const FrameConfig& cfg);

// Periodic Hann window.
std::vector<double> HannWindow(int length);

// Real-input FFT of a fixed size backed by FFTW. Not thread-safe; create
// one per thread.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  // |in| is zero-padded or truncated to n.
  void Forward(const std::vector<double>& in, std::vector<std::complex<double>>* out);
  // Unnormalized inverse (result scaled by n).
  void Inverse(const std::vector<std::complex<double>>& in, std::vector<double>* out);

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

// Complex STFT, [frames x bins].
std::vector<std::vector<std::complex<double>>> Stft(const AudioClip& clip,
                                                    const FrameConfig& cfg);
Mat StftMagnitude(const AudioClip& clip, const FrameConfig& cfg);

// Weighted overlap-add inverse of Stft(); output length is
// (frames - 1) * shift + frame_length.
std::vector<double> Istft(const std::vector<std::vector<std::complex<double>>>& spec,
                          const FrameConfig& cfg);

}  // namespace emoxfer::dsp

#endif  // EMOXFER_DSP_STFT_H_
