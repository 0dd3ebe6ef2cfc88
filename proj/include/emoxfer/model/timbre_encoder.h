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

#ifndef EMOXFER_MODEL_TIMBRE_ENCODER_H_
#define EMOXFER_MODEL_TIMBRE_ENCODER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emoxfer/core/nn.h"
#include "emoxfer/model/config.h"

namespace emoxfer::model {

// Trainable per-speaker rows.
class TimbreLookup {
 public:
  TimbreLookup() = default;
  TimbreLookup(int num_speakers, int dim, Rng& rng);
  // [1 x dim]; throws LabelError for unknown speakers.
  ad::Var Forward(ad::Tape& tape, int speaker) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);
  ad::Parameter& table() { return table_; }

 private:
  ad::Parameter table_;  // [speakers x dim]
};

// Two stacked LSTMs over mel frames; the last output goes through an
// affine map and is L2-normalized.
class SpeakerEmbedder {
 public:
  SpeakerEmbedder() = default;
  SpeakerEmbedder(int mel_bands, int hidden, int dim, Rng& rng);
  // Pre-normalization projection [1 x dim].
  ad::Var Project(ad::Tape& tape, ad::Var mel) const;
  // Unit-norm embedding [1 x dim].
  ad::Var Forward(ad::Tape& tape, ad::Var mel) const;
  void Collect(const std::string& prefix, nn::ParamRegistry* reg);

 private:
  nn::Lstm lstm1_;
  nn::Lstm lstm2_;
  nn::Linear proj_;
};

struct VqOutput {
  ad::Var quantized;         // straight-through, [1 x dim]
  ad::Var commitment;        // beta * ||v - sg(q)||^2
  std::vector<int> indices;  // one per group
};

// Grouped vector quantizer with a codebook shared across groups. Codewords
// are learned by exponential moving averages rather than gradients.
class GroupedVq {
 public:
  GroupedVq() = default;
  GroupedVq(int dim, const TimbreConfig& cfg, Rng& rng);

  int dim() const { return dim_; }
  int groups() const { return groups_; }
  int group_width() const { return dim_ / groups_; }
  int codebook_size() const { return static_cast<int>(codebook_.rows()); }
  double CapacityBits() const;

  // Nearest codeword (squared Euclidean) of every group sub-vector of |v|.
  std::vector<int> Assign(const Mat& v) const;
  // Concatenated codewords for |indices|.
  Mat Lookup(const std::vector<int>& indices) const;

  // Quantizes a [1 x dim] embedding. In training mode the assignment is
  // queued for the next EMA update.
  VqOutput Quantize(ad::Tape& tape, ad::Var v, bool training);
  // Applies queued assignments: N <- d N + (1-d) n, m <- d m + (1-d) sum,
  // e = m / N. Codewords unused for dead_code_steps updates are reseeded
  // from recently seen sub-vectors using |seed|.
  void ApplyEmaUpdate(uint64_t seed);
  void DiscardPending();

  Mat& codebook() { return codebook_; }
  const Mat& codebook() const { return codebook_; }
  Mat& ema_count() { return ema_count_; }
  Mat& ema_sum() { return ema_sum_; }
  Mat& unused_steps() { return unused_steps_; }
  // Ring buffer of recent sub-vectors used for reseeding, as a matrix
  // (one row per entry) plus the next write position.
  Mat RecentBuffer() const;
  size_t recent_next() const { return recent_next_; }
  void SetRecentBuffer(const Mat& rows, size_t next);

 private:
  int dim_ = 0;
  int groups_ = 1;
  double commitment_ = 0.25;
  double decay_ = 0.99;
  int dead_after_ = 1000;
  int recent_capacity_ = 512;

  Mat codebook_;      // [K x dim/G]
  Mat ema_count_;     // [K x 1]
  Mat ema_sum_;       // [K x dim/G]
  Mat unused_steps_;  // [K x 1]

  Mat pending_count_;
  Mat pending_sum_;
  std::vector<Vec> recent_;
  size_t recent_next_ = 0;
};

// Throws ConfigError unless G is 2, 4 or 8 and divides |dim|.
void ValidateIbGroups(int groups, int dim);

// Elementwise mean of encodings; throws DataError when empty.
Mat AverageTimbre(const std::vector<Mat>& encodings);

// External embeddings: float32 LE matrix (one row per speaker) plus an
// index of "speaker<TAB>row" lines.
std::map<std::string, Vec> LoadExternalEmbeddings(const std::string& matrix_path,
                                                  const std::string& index_path, int dim);

}  // namespace emoxfer::model

#endif  // EMOXFER_MODEL_TIMBRE_ENCODER_H_
