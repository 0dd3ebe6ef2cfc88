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

#include "emoxfer/dsp/prosody.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer::dsp {

int PhonemeAlignment::TotalFrames() const {
  return std::accumulate(durations.begin(), durations.end(), 0);
}

std::vector<double> PhonemeAverage(std::span<const double> frame_values,
                                   const PhonemeAlignment& alignment,
                                   const std::vector<bool>* voiced_mask) {
  if (alignment.durations.size() != alignment.phoneme_ids.size()) {
    throw AlignmentError("alignment has mismatched id/duration counts");
  }
  const int total = alignment.TotalFrames();
  if (total != static_cast<int>(frame_values.size())) {
    throw AlignmentError("durations sum to " + std::to_string(total) + " frames but " +
                         std::to_string(frame_values.size()) + " frames are given");
  }
  if (voiced_mask != nullptr && voiced_mask->size() != frame_values.size()) {
    throw AlignmentError("voiced mask length differs from frame count");
  }

  double voiced_mean = 0.0;
  if (voiced_mask != nullptr) {
    double acc = 0.0;
    int n = 0;
    for (size_t i = 0; i < frame_values.size(); ++i) {
      if ((*voiced_mask)[i]) {
        acc += frame_values[i];
        ++n;
      }
    }
    if (n == 0) throw DataError("no voiced frames in utterance");
    voiced_mean = acc / n;
  }

  std::vector<double> out;
  out.reserve(alignment.size());
  size_t pos = 0;
  for (int d : alignment.durations) {
    if (d < 1) throw AlignmentError("phoneme duration must be at least one frame");
    double acc = 0.0;
    int n = 0;
    for (int k = 0; k < d; ++k, ++pos) {
      if (voiced_mask == nullptr || (*voiced_mask)[pos]) {
        acc += frame_values[pos];
        ++n;
      }
    }
    out.push_back(n > 0 ? acc / n : voiced_mean);
  }
  return out;
}

LogF0Track InterpolateLogF0(std::span<const double> f0_hz) {
  const size_t n = f0_hz.size();
  LogF0Track track{std::vector<double>(n, 0.0), std::vector<bool>(n, false)};
  long prev = -1;
  for (size_t i = 0; i < n; ++i) {
    if (f0_hz[i] <= 0.0) continue;
    track.log_f0[i] = std::log(f0_hz[i]);
    track.valid[i] = true;
    if (prev >= 0 && static_cast<size_t>(prev) + 1 < i) {
      const double a = track.log_f0[static_cast<size_t>(prev)];
      const double b = track.log_f0[i];
      const double span = static_cast<double>(i - static_cast<size_t>(prev));
      for (size_t j = static_cast<size_t>(prev) + 1; j < i; ++j) {
        track.log_f0[j] = a + (b - a) * static_cast<double>(j - static_cast<size_t>(prev)) / span;
        track.valid[j] = true;
      }
    }
    prev = static_cast<long>(i);
  }
  return track;
}

Mat PhonemeProsody(std::span<const double> f0_hz, std::span<const double> energy_db,
                   const PhonemeAlignment& alignment) {
  if (f0_hz.size() != energy_db.size()) throw AlignmentError("F0 and energy lengths differ");
  const LogF0Track track = InterpolateLogF0(f0_hz);
  const std::vector<double> logf0 = PhonemeAverage(track.log_f0, alignment, &track.valid);
  const std::vector<double> energy = PhonemeAverage(energy_db, alignment);
  Mat out(static_cast<Eigen::Index>(alignment.size()), kProsodyDims);
  for (size_t i = 0; i < alignment.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out(r, kLogF0) = logf0[i];
    out(r, kEnergy) = energy[i];
    out(r, kLogDuration) = std::log(static_cast<double>(alignment.durations[i]));
  }
  return out;
}

void SpeakerStatsAccumulator::Add(const Mat& features) {
  if (features.cols() != kProsodyDims) throw ShapeError("prosody features must have 3 columns");
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    ++count_;
    for (int d = 0; d < kProsodyDims; ++d) {
      const double x = features(r, d);
      const double delta = x - mean_[static_cast<size_t>(d)];
      mean_[static_cast<size_t>(d)] += delta / static_cast<double>(count_);
      m2_[static_cast<size_t>(d)] += delta * (x - mean_[static_cast<size_t>(d)]);
    }
  }
}

SpeakerStats SpeakerStatsAccumulator::Finalize(double min_std) const {
  if (count_ == 0) throw DataError("no phonemes accumulated for speaker statistics");
  SpeakerStats s;
  for (size_t d = 0; d < kProsodyDims; ++d) {
    s.mean[d] = mean_[d];
    s.stddev[d] = std::max(min_std, std::sqrt(m2_[d] / static_cast<double>(count_)));
  }
  return s;
}

Mat NormalizeProsody(const Mat& features, const SpeakerStats& stats) {
  if (features.cols() != kProsodyDims) throw ShapeError("prosody features must have 3 columns");
  Mat out(features.rows(), kProsodyDims);
  for (int d = 0; d < kProsodyDims; ++d) {
    out.col(d) = (features.col(d).array() - stats.mean[static_cast<size_t>(d)]) /
                 stats.stddev[static_cast<size_t>(d)];
  }
  return out;
}

Mat DenormalizeProsody(const Mat& targets, const SpeakerStats& stats) {
  if (targets.cols() != kProsodyDims) throw ShapeError("prosody targets must have 3 columns");
  Mat out(targets.rows(), kProsodyDims);
  for (int d = 0; d < kProsodyDims; ++d) {
    out.col(d) = targets.col(d).array() * stats.stddev[static_cast<size_t>(d)] +
                 stats.mean[static_cast<size_t>(d)];
  }
  return out;
}

const SpeakerStats& SpeakerStatsTable::Get(const std::string& speaker) const {
  auto it = table_.find(speaker);
  if (it == table_.end()) throw MissingStatsError("no prosody statistics for speaker '" + speaker + "'");
  return it->second;
}

void SpeakerStatsTable::Save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << std::setprecision(17);
  for (const auto& [speaker, s] : table_) {
    os << speaker << '\t';
    for (size_t d = 0; d < kProsodyDims; ++d) {
      os << s.mean[d] << ' ' << s.stddev[d] << (d + 1 < kProsodyDims ? ' ' : '\n');
    }
  }
}

SpeakerStatsTable SpeakerStatsTable::Load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  SpeakerStatsTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": missing tab");
    SpeakerStats s;
    std::istringstream ls(line.substr(tab + 1));
    for (size_t d = 0; d < kProsodyDims; ++d) {
      if (!(ls >> s.mean[d] >> s.stddev[d])) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected six numbers");
      }
      if (!(s.stddev[d] > 0.0)) throw ParseError(path + ": non-positive standard deviation");
    }
    table.Set(line.substr(0, tab), s);
  }
  return table;
}

}  // namespace emoxfer::dsp
