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

#include "emoxfer/eval/metrics.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "emoxfer/core/error.h"
#include "emoxfer/dsp/mel.h"

namespace emoxfer::eval {

std::vector<double> F0Proxy(const Mat& log_mel, double lo_hz, double hi_hz) {
  if (log_mel.cols() != dsp::kNumMelBands) throw ShapeError("F0 proxy needs an 80-band log-mel");
  const Vec centres = dsp::MelCenterFrequencies(dsp::MelConfig{});
  std::vector<Eigen::Index> bands;
  for (Eigen::Index b = 0; b < centres.size(); ++b) {
    if (centres(b) >= lo_hz && centres(b) <= hi_hz) bands.push_back(b);
  }
  std::vector<double> out(static_cast<size_t>(log_mel.rows()));
  for (Eigen::Index t = 0; t < log_mel.rows(); ++t) {
    double peak = -1e300;
    for (Eigen::Index b : bands) peak = std::max(peak, log_mel(t, b));
    double num = 0.0, den = 0.0;
    for (Eigen::Index b : bands) {
      const double w = std::exp(2.0 * (log_mel(t, b) - peak));
      num += w * centres(b);
      den += w;
    }
    out[static_cast<size_t>(t)] = num / den;
  }
  return out;
}

double Pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ParameterError("correlation needs two equal-length series");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

namespace {

std::vector<double> Ranks(std::span<const double> v) {
  std::vector<size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
  std::vector<double> r(v.size());
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double Spearman(std::span<const double> a, std::span<const double> b) {
  const std::vector<double> ra = Ranks(a), rb = Ranks(b);
  return Pearson(ra, rb);
}

Vec MelEnvelope(const Mat& log_mel, int coefficients) {
  if (log_mel.rows() == 0) throw ShapeError("empty spectrogram");
  const Eigen::Index bands = log_mel.cols();
  if (coefficients < 1 || coefficients >= bands) throw ParameterError("coefficient count out of range");
  const Eigen::RowVectorXd mean = log_mel.colwise().mean();
  Vec c(coefficients);
  for (int k = 1; k <= coefficients; ++k) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < bands; ++b) {
      acc += mean(b) * std::cos(std::numbers::pi * k * (static_cast<double>(b) + 0.5) / static_cast<double>(bands));
    }
    c(k - 1) = acc * std::sqrt(2.0 / static_cast<double>(bands));
  }
  return c;
}

double EnvelopeDistance(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ShapeError("envelope sizes differ");
  return (a - b).norm();
}

double ProsodyDeviation(const Mat& physical, const dsp::SpeakerStats& stats) {
  if (physical.cols() != dsp::kProsodyDims || physical.rows() == 0) throw ShapeError("prosody must be [n x 3]");
  const Mat z = dsp::NormalizeProsody(physical, stats);
  return std::sqrt(z.colwise().mean().array().square().mean());
}

}  // namespace emoxfer::eval
