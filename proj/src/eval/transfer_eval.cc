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

#include "emoxfer/eval/transfer_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"
#include "emoxfer/eval/metrics.h"
#include "emoxfer/training/objective.h"

namespace emoxfer::eval {

TargetVoice SeenVoice(const model::EmotionTransferModel& model, const training::CheckpointMeta& meta,
                      const std::string& speaker) {
  const auto it = std::find(meta.speakers.begin(), meta.speakers.end(), speaker);
  if (it == meta.speakers.end()) throw DataError("speaker '" + speaker + "' was not seen in training");
  TargetVoice v;
  v.name = speaker;
  v.timbre = model.LookupTimbre(static_cast<int>(it - meta.speakers.begin()));
  v.stats = meta.speaker_stats.Get(speaker);
  return v;
}

TargetVoice ZeroShotVoice(model::EmotionTransferModel& model, const std::string& speaker,
                          const std::vector<training::PreparedUtterance>& refs) {
  if (refs.empty()) throw DataError("zero-shot synthesis needs reference utterances");
  std::vector<Mat> mels;
  dsp::SpeakerStatsAccumulator acc;
  for (const auto& r : refs) {
    mels.push_back(training::NormalizeMelWith(r.log_mel, model.mel_mean(), model.mel_std()));
    acc.Add(r.prosody);
  }
  TargetVoice v;
  v.name = speaker;
  v.timbre = model.AverageTimbreFromMels(mels);
  v.stats = acc.Finalize();
  return v;
}

std::vector<training::PreparedUtterance> ReferenceUtterances(const training::PreparedCorpus& corpus,
                                                             const std::string& speaker, int count) {
  std::vector<training::PreparedUtterance> out;
  for (const auto& u : corpus.utterances) {
    if (u.speaker == speaker && static_cast<int>(out.size()) < count) out.push_back(u);
  }
  if (out.empty()) throw DataError("no utterances of speaker '" + speaker + "'");
  return out;
}

std::map<std::string, Vec> SpeakerEnvelopes(const training::PreparedCorpus& corpus) {
  std::map<std::string, Vec> sum;
  std::map<std::string, int> count;
  for (const auto& u : corpus.utterances) {
    const Vec e = MelEnvelope(u.log_mel);
    auto [it, inserted] = sum.try_emplace(u.speaker, Vec::Zero(e.size()));
    it->second += e;
    ++count[u.speaker];
  }
  for (auto& [name, v] : sum) v /= count[name];
  return sum;
}

std::vector<std::vector<int>> TestSentences(const toy::ToyCorpusSpec& spec, int count, uint64_t seed) {
  std::vector<std::vector<int>> out;
  for (int i = 0; i < count; ++i) {
    Rng rng(MixSeed(seed, static_cast<uint64_t>(i)));
    std::vector<int> s;
    for (int k = 0; k < spec.phonemes_per_utterance; ++k) s.push_back(rng.UniformInt(spec.vocab_size));
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

double StoredMedian(const training::CheckpointMeta& meta, int emotion) {
  if (emotion < 0 || emotion >= static_cast<int>(meta.intensity_medians.size()) ||
      std::isnan(meta.intensity_medians[static_cast<size_t>(emotion)])) {
    throw DataError("no stored intensity median for emotion " + std::to_string(emotion));
  }
  return meta.intensity_medians[static_cast<size_t>(emotion)];
}

bool RecordedBy(const toy::ToyCorpus& toy, const std::string& speaker, int emotion) {
  for (const auto& v : toy.speakers) {
    if (v.name == speaker) return std::find(v.emotions.begin(), v.emotions.end(), emotion) != v.emotions.end();
  }
  return false;
}

}  // namespace

TransferReport EvaluateTransfer(const model::EmotionTransferModel& model, const training::CheckpointMeta& meta,
                                const toy::ToyCorpus& toy, const std::vector<TargetVoice>& voices,
                                const std::map<std::string, Vec>& envelopes, const TransferEvalOptions& opts) {
  const auto sentences = TestSentences(toy.spec, opts.sentences, opts.seed);
  std::vector<std::string> sources;
  for (const auto& v : toy.speakers) {
    if (v.source) sources.push_back(v.name);
  }
  TransferReport report;
  report.all_ok = true;
  for (const TargetVoice& voice : voices) {
    const Vec& target_env = envelopes.at(voice.name);
    for (int e = 0; e < toy.spec.n_emotions; ++e) {
      if (RecordedBy(toy, voice.name, e)) continue;
      PairResult pr;
      pr.target = voice.name;
      pr.emotion = e;
      const double intensity = opts.intensity >= 0.0 ? opts.intensity : StoredMedian(meta, e);
      Vec pooled = Vec::Zero(target_env.size());
      for (const auto& phonemes : sentences) {
        const model::SynthesisResult syn = model.Synthesize(phonemes, e, intensity, voice.timbre, voice.stats);
        const auto tmpl = toy::TemplateContour(toy.spec.templates[static_cast<size_t>(e)], syn.prosody.durations);
        pr.correlations.push_back(Pearson(F0Proxy(syn.mel), tmpl));
        const Vec env = MelEnvelope(syn.mel);
        pooled += env;
        pr.target_distance.push_back(EnvelopeDistance(env, target_env));
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& s : sources) nearest = std::min(nearest, EnvelopeDistance(env, envelopes.at(s)));
        pr.source_distance.push_back(nearest);
      }
      pooled /= static_cast<double>(sentences.size());
      pr.median_correlation = training::Median(pr.correlations);
      for (double d : pr.target_distance) pr.mean_target_distance += d / static_cast<double>(sentences.size());
      pr.pooled_target_distance = EnvelopeDistance(pooled, target_env);
      pr.pooled_source_distance = std::numeric_limits<double>::infinity();
      for (const auto& s : sources) {
        pr.pooled_source_distance = std::min(pr.pooled_source_distance, EnvelopeDistance(pooled, envelopes.at(s)));
      }
      pr.emotion_ok = pr.median_correlation > 0.8;
      pr.speaker_ok = pr.pooled_target_distance < pr.pooled_source_distance;
      report.all_ok = report.all_ok && pr.emotion_ok && pr.speaker_ok;
      report.pairs.push_back(std::move(pr));
    }
  }
  if (report.pairs.empty()) throw DataError("no unseen (target, emotion) pairs to evaluate");
  for (const auto& p : report.pairs) {
    report.mean_correlation += p.median_correlation / static_cast<double>(report.pairs.size());
    report.mean_target_distance += p.mean_target_distance / static_cast<double>(report.pairs.size());
  }
  return report;
}

std::vector<IntensityOrderResult> EvaluateIntensityOrder(const model::EmotionTransferModel& model,
                                                         const training::CheckpointMeta& meta,
                                                         const toy::ToyCorpus& toy,
                                                         const std::vector<TargetVoice>& voices,
                                                         const TransferEvalOptions& opts) {
  const auto sentences = TestSentences(toy.spec, opts.sentences, opts.seed);
  std::vector<IntensityOrderResult> out;
  for (int e = 1; e < toy.spec.n_emotions; ++e) {
    IntensityOrderResult r;
    r.emotion = e;
    const std::vector<double> levels{0.1, StoredMedian(meta, e), 1.0};
    for (const TargetVoice& voice : voices) {
      if (RecordedBy(toy, voice.name, e)) continue;
      for (const auto& phonemes : sentences) {
        std::vector<double> dev;
        for (double level : levels) {
          const model::SynthesisResult syn = model.Synthesize(phonemes, e, level, voice.timbre, voice.stats);
          dev.push_back(ProsodyDeviation(syn.prosody.physical, voice.stats));
        }
        ++r.sentences;
        if (Spearman(levels, dev) > 1.0 - 1e-12) ++r.monotone;
      }
    }
    out.push_back(r);
  }
  return out;
}

}  // namespace emoxfer::eval
