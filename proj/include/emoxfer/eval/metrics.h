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

#ifndef EMOXFER_EVAL_METRICS_H_
#define EMOXFER_EVAL_METRICS_H_

#include <span>
#include <vector>

#include "emoxfer/core/tensor.h"
#include "emoxfer/dsp/prosody.h"

namespace emoxfer::eval {

// Per-frame pitch proxy read off a log-mel spectrogram: the power-weighted
// centroid (Hz) of the bands centred in [lo_hz, hi_hz].
std::vector<double> F0Proxy(const Mat& log_mel, double lo_hz = 60.0, double hi_hz = 400.0);

// Pearson correlation; 0 when either input is constant. Throws
// ParameterError on length mismatch or fewer than two points.
double Pearson(std::span<const double> a, std::span<const double> b);
// Spearman rank correlation with average ranks for ties.
double Spearman(std::span<const double> a, std::span<const double> b);

// Smooth spectral envelope of an utterance: cepstral coefficients 1..n
// (the DCT-II of the frame-averaged log-mel, level term dropped).
Vec MelEnvelope(const Mat& log_mel, int coefficients = 12);
double EnvelopeDistance(const Vec& a, const Vec& b);

// How far an utterance's average delivery sits from the speaker's mean: the
// RMS over the three dimensions of the utterance-mean z-score of
// phoneme-level prosody [n x 3] under |stats|. Averaging first keeps
// lexical phoneme-to-phoneme variation out of the measure.
double ProsodyDeviation(const Mat& physical, const dsp::SpeakerStats& stats);

}  // namespace emoxfer::eval

#endif  // EMOXFER_EVAL_METRICS_H_
