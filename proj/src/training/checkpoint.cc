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

#include "emoxfer/training/checkpoint.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer::training {
namespace {

constexpr char kMagic[] = "EMOXFER-CHECKPOINT 1";
const char* const kRequiredSections[] = {"emotion_encoder", "prosody_predictor", "timbre_encoder",
                                         "phoneme_encoder", "decoder",           "emotion_table",
                                         "prosody_injection", "vq",              "metadata"};

Mat Scalar(double v) { return Mat::Constant(1, 1, v); }

const Mat& Need(const TensorArchive& ar, const std::string& section, const std::string& name) {
  if (!ar.Has(section, name)) throw CheckpointError("checkpoint lacks tensor " + section + "/" + name);
  return ar.Get(section, name);
}

void Assign(const Mat& src, Mat* dst, const std::string& what) {
  if (src.rows() != dst->rows() || src.cols() != dst->cols()) {
    std::ostringstream os;
    os << "checkpoint tensor " << what << " is " << src.rows() << "x" << src.cols() << ", model expects "
       << dst->rows() << "x" << dst->cols();
    throw CheckpointError(os.str());
  }
  *dst = src;
}

}  // namespace

void SaveCheckpoint(const std::string& path, const RunConfig& cfg, model::EmotionTransferModel& model,
                    const Adam* adam, const CheckpointMeta& meta) {
  TensorArchive ar(kMagic);
  ar.SetField("config_hash", ConfigHash(cfg));
  ar.SetField("step", std::to_string(meta.step));
  ar.SetField("config", DumpRunConfig(cfg));
  std::ostringstream names;
  for (size_t i = 0; i < meta.speakers.size(); ++i) names << (i ? " " : "") << meta.speakers[i];
  ar.SetField("speakers", names.str());

  for (const auto& s : model.sections()) {
    for (const auto& [name, p] : s.params.entries()) ar.Put(s.name, name, p->value);
  }
  auto& vq = model.vq();
  ar.Put("vq", "codebook", vq.codebook());
  ar.Put("vq", "ema_count", vq.ema_count());
  ar.Put("vq", "ema_sum", vq.ema_sum());
  ar.Put("vq", "unused_steps", vq.unused_steps());
  ar.Put("vq", "recent", vq.RecentBuffer());
  ar.Put("vq", "recent_next", Scalar(static_cast<double>(vq.recent_next())));

  if (adam != nullptr) {
    const Adam& a = *adam;
    ar.Put("optimizer", "steps", Scalar(a.steps()));
    const auto& entries = a.params().entries();
    for (size_t i = 0; i < entries.size(); ++i) {
      ar.Put("optimizer", "m." + entries[i].first, a.first_moments()[i]);
      ar.Put("optimizer", "v." + entries[i].first, a.second_moments()[i]);
    }
  }

  ar.Put("metadata", "mel_mean", model.mel_mean());
  ar.Put("metadata", "mel_std", model.mel_std());
  Mat medians(1, static_cast<Eigen::Index>(meta.intensity_medians.size()));
  for (size_t i = 0; i < meta.intensity_medians.size(); ++i) {
    medians(0, static_cast<Eigen::Index>(i)) = meta.intensity_medians[i];
  }
  ar.Put("metadata", "intensity_medians", medians);
  Mat stats(static_cast<Eigen::Index>(meta.speakers.size()), 2 * dsp::kProsodyDims);
  for (size_t s = 0; s < meta.speakers.size(); ++s) {
    const auto& st = meta.speaker_stats.Get(meta.speakers[s]);
    for (int d = 0; d < dsp::kProsodyDims; ++d) {
      stats(static_cast<Eigen::Index>(s), 2 * d) = st.mean[static_cast<size_t>(d)];
      stats(static_cast<Eigen::Index>(s), 2 * d + 1) = st.stddev[static_cast<size_t>(d)];
    }
  }
  ar.Put("metadata", "speaker_stats", stats);
  ar.Save(path);
}

Checkpoint ReadCheckpoint(const std::string& path) {
  Checkpoint c;
  try {
    c.archive = TensorArchive::Load(path, kMagic);
    c.config = ParseRunConfig(c.archive.Field("config"));
    c.config_hash = c.archive.Field("config_hash");
    c.meta.step = std::stoi(c.archive.Field("step"));
    std::istringstream names(c.archive.Field("speakers"));
    for (std::string s; names >> s;) c.meta.speakers.push_back(s);
  } catch (const CheckpointError&) {
    throw;
  } catch (const Error& e) {
    throw CheckpointError(path + ": " + e.what());
  } catch (const std::logic_error& e) {
    throw CheckpointError(path + ": malformed header (" + e.what() + ")");
  }
  if (!c.archive.HasSection("metadata")) throw CheckpointError(path + ": checkpoint lacks section metadata");
  const Mat& medians = Need(c.archive, "metadata", "intensity_medians");
  c.meta.intensity_medians.assign(medians.data(), medians.data() + medians.size());
  const Mat& stats = Need(c.archive, "metadata", "speaker_stats");
  if (stats.rows() != static_cast<Eigen::Index>(c.meta.speakers.size()) || stats.cols() != 2 * dsp::kProsodyDims) {
    throw CheckpointError(path + ": speaker statistics do not match the speaker list");
  }
  for (size_t s = 0; s < c.meta.speakers.size(); ++s) {
    dsp::SpeakerStats st;
    for (int d = 0; d < dsp::kProsodyDims; ++d) {
      st.mean[static_cast<size_t>(d)] = stats(static_cast<Eigen::Index>(s), 2 * d);
      st.stddev[static_cast<size_t>(d)] = stats(static_cast<Eigen::Index>(s), 2 * d + 1);
    }
    c.meta.speaker_stats.Set(c.meta.speakers[s], st);
  }
  if (ConfigHash(c.config) != c.config_hash) {
    c.warnings.push_back("checkpoint config hash " + c.config_hash + " does not match its stored config (" +
                         ConfigHash(c.config) + ")");
  }
  return c;
}

void RestoreModel(const Checkpoint& ckpt, model::EmotionTransferModel* model) {
  const TensorArchive& ar = ckpt.archive;
  for (const char* s : kRequiredSections) {
    if (!ar.HasSection(s)) throw CheckpointError(std::string("checkpoint lacks section ") + s);
  }
  for (auto& s : model->sections()) {
    for (const auto& [name, p] : s.params.entries()) Assign(Need(ar, s.name, name), &p->value, name);
  }
  auto& vq = model->vq();
  Assign(Need(ar, "vq", "codebook"), &vq.codebook(), "vq/codebook");
  Assign(Need(ar, "vq", "ema_count"), &vq.ema_count(), "vq/ema_count");
  Assign(Need(ar, "vq", "ema_sum"), &vq.ema_sum(), "vq/ema_sum");
  Assign(Need(ar, "vq", "unused_steps"), &vq.unused_steps(), "vq/unused_steps");
  vq.SetRecentBuffer(Need(ar, "vq", "recent"),
                     static_cast<size_t>(std::lround(Need(ar, "vq", "recent_next")(0, 0))));
  vq.DiscardPending();
  model->SetMelStats(Need(ar, "metadata", "mel_mean"), Need(ar, "metadata", "mel_std"));
}

void RestoreOptimizer(const Checkpoint& ckpt, Adam* adam) {
  const TensorArchive& ar = ckpt.archive;
  if (!ar.HasSection("optimizer")) throw CheckpointError("checkpoint lacks section optimizer");
  adam->set_steps(static_cast<int>(std::lround(Need(ar, "optimizer", "steps")(0, 0))));
  const auto& entries = adam->params().entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    Assign(Need(ar, "optimizer", "m." + entries[i].first), &adam->first_moments()[i], "m." + entries[i].first);
    Assign(Need(ar, "optimizer", "v." + entries[i].first), &adam->second_moments()[i], "v." + entries[i].first);
  }
}

std::optional<std::string> HashWarning(const Checkpoint& ckpt, const RunConfig& expected) {
  const std::string h = ConfigHash(expected);
  if (h == ckpt.config_hash) return std::nullopt;
  return "checkpoint was written with config hash " + ckpt.config_hash + ", current config hashes to " + h;
}

LoadedModel LoadModel(const std::string& path) {
  LoadedModel out;
  out.checkpoint = ReadCheckpoint(path);
  out.model = std::make_unique<model::EmotionTransferModel>(out.checkpoint.config.model, out.checkpoint.config.seed);
  RestoreModel(out.checkpoint, out.model.get());
  return out;
}

}  // namespace emoxfer::training
