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

#include "emoxfer/training/corpus.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "emoxfer/core/archive.h"
#include "emoxfer/core/error.h"
#include "emoxfer/dsp/audio.h"
#include "emoxfer/dsp/mel.h"
#include "emoxfer/dsp/pitch.h"

namespace emoxfer::training {
namespace {

constexpr char kCorpusMagic[] = "EMOXFER-CORPUS 1";

Mat RowOf(const std::vector<int>& v) {
  Mat m(1, static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

std::vector<int> IntsOf(const Mat& m) {
  std::vector<int> v(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) v[static_cast<size_t>(i)] = static_cast<int>(std::lround(m.data()[i]));
  return v;
}

}  // namespace

PreparedUtterance PrepareUtterance(const dsp::UtteranceRecord& record) {
  if (record.durations.size() != record.phoneme_ids.size()) {
    throw AlignmentError(record.audio_path + ": durations do not match the phoneme sequence");
  }
  const dsp::AudioClip clip = dsp::ReadWav(record.audio_path);
  PreparedUtterance u;
  u.id = std::filesystem::path(record.audio_path).stem().string();
  u.speaker = record.speaker_id;
  u.phoneme_ids = record.phoneme_ids;
  u.label = record.emotion_label;
  u.log_mel = dsp::ComputeMel(clip).values;
  const dsp::FrameProsody fp = dsp::ExtractFrameProsody(clip);
  dsp::PhonemeAlignment ali{record.phoneme_ids, record.durations};
  ali = dsp::ReconcileAlignment(std::move(ali), static_cast<int>(u.log_mel.rows()));
  u.durations = ali.durations;
  u.prosody = dsp::PhonemeProsody(fp.f0_hz, fp.energy_db, ali);
  RoundToFloat(&u.log_mel);
  RoundToFloat(&u.prosody);
  return u;
}

int PreparedCorpus::SpeakerIndex(const std::string& speaker) const {
  auto it = std::lower_bound(speakers.begin(), speakers.end(), speaker);
  return it != speakers.end() && *it == speaker ? static_cast<int>(it - speakers.begin()) : -1;
}

std::vector<dsp::UtteranceRecord> AttachAlignments(std::vector<dsp::UtteranceRecord> records, int vocab_size) {
  for (auto& r : records) {
    if (!r.durations.empty()) continue;
    const dsp::PhonemeAlignment ali = dsp::LoadAlignment(dsp::AlignmentPathFor(r.audio_path), vocab_size);
    if (ali.phoneme_ids != r.phoneme_ids) {
      throw AlignmentError(r.audio_path + ": alignment phonemes differ from the manifest");
    }
    r.durations = ali.durations;
  }
  return records;
}

PreparedCorpus PrepareCorpus(const std::vector<dsp::UtteranceRecord>& records) {
  if (records.empty()) throw DataError("empty manifest");
  PreparedCorpus c;
  std::set<std::string> names;
  for (const auto& r : records) {
    if (r.speaker_id.find_first_of(" \t") != std::string::npos) {
      throw DataError("speaker ids may not contain whitespace: '" + r.speaker_id + "'");
    }
    c.utterances.push_back(PrepareUtterance(r));
    names.insert(r.speaker_id);
  }
  c.speakers.assign(names.begin(), names.end());

  for (const auto& name : c.speakers) {
    dsp::SpeakerStatsAccumulator acc;
    for (const auto& u : c.utterances) {
      if (u.speaker == name) acc.Add(u.prosody);
    }
    dsp::SpeakerStats s = acc.Finalize();
    for (int d = 0; d < dsp::kProsodyDims; ++d) {
      s.mean[static_cast<size_t>(d)] = RoundToFloat(s.mean[static_cast<size_t>(d)]);
      s.stddev[static_cast<size_t>(d)] = RoundToFloat(s.stddev[static_cast<size_t>(d)]);
    }
    c.stats.Set(name, s);
  }

  Eigen::Index frames = 0;
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(model::kMelBands);
  for (const auto& u : c.utterances) {
    sum += u.log_mel.colwise().sum().transpose().array();
    frames += u.log_mel.rows();
  }
  const Eigen::ArrayXd mean = sum / static_cast<double>(frames);
  Eigen::ArrayXd sq = Eigen::ArrayXd::Zero(model::kMelBands);
  for (const auto& u : c.utterances) {
    sq += (u.log_mel.array().rowwise() - mean.transpose()).square().colwise().sum().transpose();
  }
  const Eigen::ArrayXd sd = (sq / static_cast<double>(frames)).sqrt().max(1e-3);
  c.mel_mean = mean.transpose().matrix();
  c.mel_std = sd.transpose().matrix();
  RoundToFloat(&c.mel_mean);
  RoundToFloat(&c.mel_std);
  return c;
}

PreparedCorpus PrepareManifest(const std::string& manifest_path, int vocab_size) {
  return PrepareCorpus(AttachAlignments(dsp::LoadManifest(manifest_path, vocab_size), vocab_size));
}

Mat NormalizeMelWith(const Mat& log_mel, const Mat& mean, const Mat& stddev) {
  if (log_mel.cols() != mean.cols() || mean.cols() != stddev.cols()) throw ShapeError("mel statistics width mismatch");
  Mat out = ((log_mel.rowwise() - mean.row(0)).array().rowwise() / stddev.row(0).array()).matrix();
  RoundToFloat(&out);
  return out;
}

std::vector<model::TrainingExample> BuildExamples(const PreparedCorpus& corpus) {
  std::vector<model::TrainingExample> out;
  out.reserve(corpus.utterances.size());
  for (const auto& u : corpus.utterances) {
    model::TrainingExample ex;
    ex.id = u.id;
    ex.phoneme_ids = u.phoneme_ids;
    ex.durations = u.durations;
    ex.mel = NormalizeMelWith(u.log_mel, corpus.mel_mean, corpus.mel_std);
    ex.prosody = dsp::NormalizeProsody(u.prosody, corpus.stats.Get(u.speaker));
    RoundToFloat(&ex.prosody);
    ex.speaker = corpus.SpeakerIndex(u.speaker);
    ex.label = u.label;
    out.push_back(std::move(ex));
  }
  return out;
}

void PreparedCorpus::Save(const std::string& path) const {
  TensorArchive ar(kCorpusMagic);
  std::ostringstream names;
  for (size_t i = 0; i < speakers.size(); ++i) names << (i ? " " : "") << speakers[i];
  ar.SetField("speakers", names.str());
  ar.SetField("utterances", std::to_string(utterances.size()));
  ar.Put("stats", "mel_mean", mel_mean);
  ar.Put("stats", "mel_std", mel_std);
  Mat prosody_stats(static_cast<Eigen::Index>(speakers.size()), 2 * dsp::kProsodyDims);
  for (size_t s = 0; s < speakers.size(); ++s) {
    const auto& st = stats.Get(speakers[s]);
    for (int d = 0; d < dsp::kProsodyDims; ++d) {
      prosody_stats(static_cast<Eigen::Index>(s), 2 * d) = st.mean[static_cast<size_t>(d)];
      prosody_stats(static_cast<Eigen::Index>(s), 2 * d + 1) = st.stddev[static_cast<size_t>(d)];
    }
  }
  ar.Put("stats", "speaker_prosody", prosody_stats);
  for (size_t i = 0; i < utterances.size(); ++i) {
    const auto& u = utterances[i];
    const std::string sec = "utt" + std::to_string(i);
    ar.SetField(sec, u.id + " " + u.speaker + " " + (u.label ? std::to_string(*u.label) : "-"));
    ar.Put(sec, "phonemes", RowOf(u.phoneme_ids));
    ar.Put(sec, "durations", RowOf(u.durations));
    ar.Put(sec, "mel", u.log_mel);
    ar.Put(sec, "prosody", u.prosody);
  }
  ar.Save(path);
}

PreparedCorpus PreparedCorpus::Load(const std::string& path) {
  const TensorArchive ar = TensorArchive::Load(path, kCorpusMagic);
  PreparedCorpus c;
  std::istringstream names(ar.Field("speakers"));
  for (std::string s; names >> s;) c.speakers.push_back(s);
  c.mel_mean = ar.Get("stats", "mel_mean");
  c.mel_std = ar.Get("stats", "mel_std");
  const Mat& ps = ar.Get("stats", "speaker_prosody");
  if (ps.rows() != static_cast<Eigen::Index>(c.speakers.size())) throw ParseError(path + ": speaker count mismatch");
  for (size_t s = 0; s < c.speakers.size(); ++s) {
    dsp::SpeakerStats st;
    for (int d = 0; d < dsp::kProsodyDims; ++d) {
      st.mean[static_cast<size_t>(d)] = ps(static_cast<Eigen::Index>(s), 2 * d);
      st.stddev[static_cast<size_t>(d)] = ps(static_cast<Eigen::Index>(s), 2 * d + 1);
    }
    c.stats.Set(c.speakers[s], st);
  }
  const long n = std::stol(ar.Field("utterances"));
  for (long i = 0; i < n; ++i) {
    const std::string sec = "utt" + std::to_string(i);
    std::istringstream meta(ar.Field(sec));
    PreparedUtterance u;
    std::string label;
    meta >> u.id >> u.speaker >> label;
    if (label != "-") u.label = std::stoi(label);
    u.phoneme_ids = IntsOf(ar.Get(sec, "phonemes"));
    u.durations = IntsOf(ar.Get(sec, "durations"));
    u.log_mel = ar.Get(sec, "mel");
    u.prosody = ar.Get(sec, "prosody");
    c.utterances.push_back(std::move(u));
  }
  return c;
}

}  // namespace emoxfer::training
