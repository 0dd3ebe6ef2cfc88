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

#include "emoxfer/model/timbre_encoder.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"

namespace emoxfer::model {

// ---- TimbreLookup -------------------------------------------------------------

TimbreLookup::TimbreLookup(int num_speakers, int dim, Rng& rng) : table_(num_speakers, dim) {
  nn::UniformInit(&table_, 0.1, rng);
}

ad::Var TimbreLookup::Forward(ad::Tape& tape, int speaker) const {
  if (speaker < 0 || speaker >= table_.value.rows()) {
    throw LabelError("unknown speaker index " + std::to_string(speaker));
  }
  return ad::GatherRows(tape.Param(table_), {speaker});
}

void TimbreLookup::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  reg->Add(prefix + ".table", &table_);
}

// ---- SpeakerEmbedder ----------------------------------------------------------

SpeakerEmbedder::SpeakerEmbedder(int mel_bands, int hidden, int dim, Rng& rng)
    : lstm1_(mel_bands, hidden, rng), lstm2_(hidden, hidden, rng), proj_(hidden, dim, rng) {}

ad::Var SpeakerEmbedder::Project(ad::Tape& tape, ad::Var mel) const {
  if (mel.rows() < 1) throw ShortInputError("speaker embedder needs at least one frame");
  ad::Var h = lstm2_.Forward(tape, lstm1_.Forward(tape, mel));
  return proj_.Forward(tape, ad::SliceRows(h, h.rows() - 1, 1));
}

ad::Var SpeakerEmbedder::Forward(ad::Tape& tape, ad::Var mel) const {
  return ad::L2NormalizeRows(Project(tape, mel));
}

void SpeakerEmbedder::Collect(const std::string& prefix, nn::ParamRegistry* reg) {
  lstm1_.Collect(prefix + ".lstm1", reg);
  lstm2_.Collect(prefix + ".lstm2", reg);
  proj_.Collect(prefix + ".proj", reg);
}

// ---- GroupedVq ----------------------------------------------------------------

GroupedVq::GroupedVq(int dim, const TimbreConfig& cfg, Rng& rng)
    : dim_(dim),
      groups_(cfg.groups),
      commitment_(cfg.commitment),
      decay_(cfg.ema_decay),
      dead_after_(cfg.dead_code_steps),
      recent_capacity_(cfg.recent_buffer) {
  if (groups_ < 1 || dim % groups_ != 0) {
    throw ConfigError("VQ group count " + std::to_string(groups_) + " does not divide width " +
                      std::to_string(dim));
  }
  if (cfg.codebook_size < 2) throw ConfigError("codebook needs at least two entries");
  const int width = group_width();
  codebook_.resize(cfg.codebook_size, width);
  const double sd = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index i = 0; i < codebook_.size(); ++i) codebook_.data()[i] = rng.Normal(0.0, sd);
  RoundToFloat(&codebook_);
  // N = 1 and m = e make the first update an exact geometric step.
  ema_count_ = Mat::Ones(cfg.codebook_size, 1);
  ema_sum_ = codebook_;
  unused_steps_ = Mat::Zero(cfg.codebook_size, 1);
  DiscardPending();
}

double GroupedVq::CapacityBits() const {
  return groups_ * std::log2(static_cast<double>(codebook_size()));
}

std::vector<int> GroupedVq::Assign(const Mat& v) const {
  if (v.rows() != 1 || v.cols() != dim_) throw ShapeError("VQ expects a [1 x " + std::to_string(dim_) + "] row");
  const int width = group_width();
  std::vector<int> idx(static_cast<size_t>(groups_));
  for (int g = 0; g < groups_; ++g) {
    const auto sub = v.block(0, g * width, 1, width);
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < codebook_.rows(); ++k) {
      const double d = (codebook_.row(k) - sub).squaredNorm();
      if (d < best) {
        best = d;
        idx[static_cast<size_t>(g)] = static_cast<int>(k);
      }
    }
  }
  return idx;
}

Mat GroupedVq::Lookup(const std::vector<int>& indices) const {
  const int width = group_width();
  Mat out(1, dim_);
  for (int g = 0; g < groups_; ++g) {
    out.block(0, g * width, 1, width) = codebook_.row(indices[static_cast<size_t>(g)]);
  }
  return out;
}

VqOutput GroupedVq::Quantize(ad::Tape& tape, ad::Var v, bool training) {
  VqOutput out;
  out.indices = Assign(v.value());
  const Mat q = Lookup(out.indices);
  out.quantized = ad::StraightThrough(v, q);
  out.commitment = ad::Scale(ad::Sum(ad::Square(ad::Sub(v, tape.Constant(q)))), commitment_);
  if (training) {
    const int width = group_width();
    for (int g = 0; g < groups_; ++g) {
      const int k = out.indices[static_cast<size_t>(g)];
      Vec sub = v.value().block(0, g * width, 1, width).transpose();
      for (Eigen::Index i = 0; i < sub.size(); ++i) sub(i) = RoundToFloat(sub(i));
      pending_count_(k, 0) += 1.0;
      pending_sum_.row(k) += sub.transpose();
      if (recent_.size() < static_cast<size_t>(recent_capacity_)) {
        recent_.push_back(sub);
      } else {
        recent_[recent_next_] = sub;
        recent_next_ = (recent_next_ + 1) % recent_.size();
      }
    }
  }
  return out;
}

void GroupedVq::ApplyEmaUpdate(uint64_t seed) {
  Rng rng(seed);
  for (Eigen::Index k = 0; k < codebook_.rows(); ++k) {
    const double n = pending_count_(k, 0);
    if (n > 0.0) {
      ema_count_(k, 0) = decay_ * ema_count_(k, 0) + (1.0 - decay_) * n;
      ema_sum_.row(k) = decay_ * ema_sum_.row(k) + (1.0 - decay_) * pending_sum_.row(k);
      unused_steps_(k, 0) = 0.0;
    } else {
      unused_steps_(k, 0) += 1.0;
      if (unused_steps_(k, 0) >= dead_after_ && !recent_.empty()) {
        const auto pick = static_cast<size_t>(rng.UniformInt(static_cast<uint64_t>(recent_.size())));
        ema_sum_.row(k) = recent_[pick].transpose();
        ema_count_(k, 0) = 1.0;
        unused_steps_(k, 0) = 0.0;
      }
    }
  }
  RoundToFloat(&ema_count_);
  RoundToFloat(&ema_sum_);
  for (Eigen::Index k = 0; k < codebook_.rows(); ++k) {
    codebook_.row(k) = ema_sum_.row(k) / ema_count_(k, 0);
  }
  RoundToFloat(&codebook_);
  DiscardPending();
}

void GroupedVq::DiscardPending() {
  pending_count_ = Mat::Zero(codebook_.rows(), 1);
  pending_sum_ = Mat::Zero(codebook_.rows(), codebook_.cols());
}

Mat GroupedVq::RecentBuffer() const {
  Mat out(static_cast<Eigen::Index>(recent_.size()), group_width());
  for (size_t i = 0; i < recent_.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = recent_[i].transpose();
  return out;
}

void GroupedVq::SetRecentBuffer(const Mat& rows, size_t next) {
  if (rows.rows() > 0 && rows.cols() != group_width()) throw ShapeError("recent buffer width mismatch");
  recent_.clear();
  for (Eigen::Index i = 0; i < rows.rows(); ++i) recent_.push_back(rows.row(i).transpose());
  recent_next_ = recent_.empty() ? 0 : next % recent_.size();
}

void ValidateIbGroups(int groups, int dim) {
  if (groups != 2 && groups != 4 && groups != 8) {
    throw ConfigError("IB group count must be one of 2, 4, 8 (got " + std::to_string(groups) + ")");
  }
  if (dim % groups != 0) throw ConfigError("IB group count must divide the timbre width");
}

Mat AverageTimbre(const std::vector<Mat>& encodings) {
  if (encodings.empty()) throw DataError("no reference encodings to average");
  Mat acc = Mat::Zero(encodings.front().rows(), encodings.front().cols());
  for (const Mat& e : encodings) {
    if (e.rows() != acc.rows() || e.cols() != acc.cols()) throw ShapeError("timbre encodings differ in shape");
    acc += e;
  }
  return acc / static_cast<double>(encodings.size());
}

std::map<std::string, Vec> LoadExternalEmbeddings(const std::string& matrix_path,
                                                  const std::string& index_path, int dim) {
  std::ifstream blob(matrix_path, std::ios::binary);
  if (!blob) throw ParseError("cannot open " + matrix_path);
  std::ifstream index(index_path);
  if (!index) throw ParseError("cannot open " + index_path);
  std::map<std::string, Vec> out;
  std::string line;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(index_path + ": expected speaker<TAB>offset");
    const std::string speaker = line.substr(0, tab);
    long long offset = -1;
    std::istringstream(line.substr(tab + 1)) >> offset;
    if (offset < 0) throw ParseError(index_path + ": bad offset for " + speaker);
    blob.clear();
    blob.seekg(offset);
    Mat row(1, dim);
    ReadFloat32LE(blob, &row);
    out[speaker] = row.row(0).transpose();
  }
  return out;
}

}  // namespace emoxfer::model
