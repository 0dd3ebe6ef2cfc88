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

#include "emoxfer/model/transfer_model.h"

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"

namespace emoxfer::model {
namespace {

// Independent initialization streams per module keep module parameters
// stable when another module's shape changes.
Rng ModuleRng(uint64_t seed, uint64_t module) { return Rng(MixSeed(seed, 0x1000 + module)); }

}  // namespace

EmotionTransferModel::EmotionTransferModel(const ModelConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.Validate();
  {
    Rng r = ModuleRng(seed, 1);
    emotion_ = EmotionEncoder(cfg_, kMelBands, r);
  }
  {
    Rng r = ModuleRng(seed, 2);
    predictor_ = ProsodyPredictor(cfg_, r);
  }
  {
    Rng r = ModuleRng(seed, 3);
    encoder_ = PhonemeEncoder(cfg_, r);
  }
  {
    Rng r = ModuleRng(seed, 4);
    decoder_ = MelDecoder(cfg_, kMelBands, r);
  }
  {
    Rng r = ModuleRng(seed, 5);
    table_ = EmotionTable(cfg_.num_emotion_slots, cfg_.model_dim, r);
  }
  {
    Rng r = ModuleRng(seed, 6);
    injection_ = ProsodyInjection(cfg_.model_dim, r);
  }
  {
    Rng r = ModuleRng(seed, 7);
    lookup_ = TimbreLookup(cfg_.num_speakers, cfg_.model_dim, r);
    embedder_ = SpeakerEmbedder(kMelBands, cfg_.timbre.lstm_hidden, cfg_.model_dim, r);
    vq_ = GroupedVq(cfg_.model_dim, cfg_.timbre, r);
  }
  mel_mean_ = Mat::Zero(1, kMelBands);
  mel_std_ = Mat::Ones(1, kMelBands);

  sections_.resize(7);
  sections_[0].name = "emotion_encoder";
  emotion_.Collect("emotion_encoder", &sections_[0].params);
  sections_[1].name = "prosody_predictor";
  predictor_.Collect("prosody_predictor", &sections_[1].params);
  sections_[2].name = "timbre_encoder";
  lookup_.Collect("timbre_encoder.lookup", &sections_[2].params);
  embedder_.Collect("timbre_encoder.embedder", &sections_[2].params);
  sections_[3].name = "phoneme_encoder";
  encoder_.Collect("phoneme_encoder", &sections_[3].params);
  sections_[4].name = "decoder";
  decoder_.Collect("decoder", &sections_[4].params);
  sections_[5].name = "emotion_table";
  table_.Collect("emotion_table", &sections_[5].params);
  sections_[6].name = "prosody_injection";
  injection_.Collect("prosody_injection", &sections_[6].params);
  for (const auto& s : sections_) {
    for (const auto& [name, p] : s.params.entries()) {
      RoundToFloat(&p->value);
      p->ZeroGrad();
      all_.Add(name, p);
    }
  }
}

const ParamSection& EmotionTransferModel::section(const std::string& name) const {
  for (const auto& s : sections_) {
    if (s.name == name) return s;
  }
  throw Error("no parameter section '" + name + "'");
}

ad::Var EmotionTransferModel::TrainingTimbre(ad::Tape& tape, const TrainingExample& ex,
                                             const ForwardOptions& opts, ad::Var* commitment) {
  if (cfg_.timbre.mode == TimbreMode::kLookup) {
    *commitment = tape.Constant(Mat::Zero(1, 1));
    return lookup_.Forward(tape, ex.speaker);
  }
  ad::Var v = embedder_.Forward(tape, tape.Constant(ex.mel));
  VqOutput q = vq_.Quantize(tape, v, opts.training && opts.quantize);
  *commitment = q.commitment;
  return opts.quantize ? q.quantized : v;
}

ForwardResult EmotionTransferModel::Forward(ad::Tape& tape, const TrainingExample& ex,
                                            const ForwardOptions& opts, Rng& rng) {
  if (ex.mel.cols() != kMelBands) throw ShapeError("mel must have 80 bands");
  if (ex.prosody.rows() != static_cast<Eigen::Index>(ex.phoneme_ids.size()) ||
      ex.durations.size() != ex.phoneme_ids.size()) {
    throw ShapeError("phonemes, durations and prosody targets must align");
  }
  ForwardResult r;
  ad::Var mel = tape.Constant(ex.mel);

  EmotionStepOptions eopts;
  eopts.alpha = opts.alpha;
  eopts.tau = opts.tau;
  eopts.training = opts.training;
  eopts.reversal_scale = opts.reversal_scale;
  r.emotion = emotion_.Forward(tape, mel, ex.speaker, ex.label, eopts, rng);
  r.l_adv = r.emotion.adv_loss;
  r.l_emo = r.emotion.emo_loss;

  ad::Var selector = opts.straight_through ? r.emotion.one_hot : r.emotion.soft;
  ad::Var emotion_enc = table_.Encode(tape, selector, r.emotion.intensity);
  ad::Var hidden = ComposeHidden(encoder_.Forward(tape, ex.phoneme_ids), emotion_enc);
  r.prosody_input = hidden;
  r.pred_prosody = predictor_.Forward(tape, hidden, rng, opts.training);
  ad::Var target_prosody = tape.Constant(ex.prosody);
  r.l_pros = ProsodyLoss(r.pred_prosody, target_prosody);

  // Prosody enters before timbre: the predictor never sees the timbre.
  ad::Var frames = LengthRegulate(injection_.Forward(tape, hidden, target_prosody), ex.durations);
  if (frames.rows() != ex.mel.rows()) throw AlignmentError("durations do not cover the mel frames");
  r.timbre = TrainingTimbre(tape, ex, opts, &r.commitment);
  r.pred_mel = decoder_.Forward(tape, AddTimbre(frames, r.timbre));
  r.l_mel = ad::Mean(ad::Abs(ad::Sub(r.pred_mel, mel)));
  return r;
}

Mat EmotionTransferModel::LookupTimbre(int speaker) const {
  ad::Tape tape(false);
  return lookup_.Forward(tape, speaker).value();
}

Mat EmotionTransferModel::TimbreFromMel(const Mat& mel_normalized) {
  ad::Tape tape(false);
  ad::Var v = embedder_.Forward(tape, tape.Constant(mel_normalized));
  return vq_.Quantize(tape, v, false).quantized.value();
}

Mat EmotionTransferModel::AverageTimbreFromMels(const std::vector<Mat>& mels) {
  std::vector<Mat> enc;
  enc.reserve(mels.size());
  for (const Mat& m : mels) enc.push_back(TimbreFromMel(m));
  return AverageTimbre(enc);
}

Vec EmotionTransferModel::EmotionLogits(const Mat& mel_normalized) const {
  ad::Tape tape(false);
  ad::Var z = emotion_.Logits(tape, emotion_.Hidden(tape, tape.Constant(mel_normalized)));
  return z.value().row(0).transpose();
}

SynthesisResult EmotionTransferModel::Synthesize(const std::vector<int>& phoneme_ids, int type_id,
                                                 double intensity, const Mat& timbre,
                                                 const dsp::SpeakerStats& target_stats) const {
  if (timbre.rows() != 1 || timbre.cols() != cfg_.model_dim) throw ShapeError("timbre must be [1 x model_dim]");
  ad::Tape tape(false);
  Rng unused(0);
  ad::Var hidden = ComposeHidden(encoder_.Forward(tape, phoneme_ids), table_.Encode(tape, type_id, intensity));
  ad::Var pred = predictor_.Forward(tape, hidden, unused, false);
  SynthesisResult out;
  out.prosody_normalized = pred.value();
  out.prosody = RealizeProsody(out.prosody_normalized, target_stats);
  ad::Var frames = LengthRegulate(injection_.Forward(tape, hidden, pred), out.prosody.durations);
  ad::Var mel = decoder_.Forward(tape, AddTimbre(frames, tape.Constant(timbre)));
  out.mel_normalized = mel.value();
  out.mel = DenormalizeMel(out.mel_normalized);
  return out;
}

Mat EmotionTransferModel::NormalizeMel(const Mat& log_mel) const {
  if (log_mel.cols() != kMelBands) throw ShapeError("mel must have 80 bands");
  return ((log_mel.rowwise() - mel_mean_.row(0)).array().rowwise() / mel_std_.row(0).array()).matrix();
}

Mat EmotionTransferModel::DenormalizeMel(const Mat& normalized) const {
  return ((normalized.array().rowwise() * mel_std_.row(0).array()).rowwise() + mel_mean_.row(0).array()).matrix();
}

void EmotionTransferModel::SetMelStats(const Mat& mean, const Mat& stddev) {
  if (mean.rows() != 1 || mean.cols() != kMelBands || stddev.rows() != 1 || stddev.cols() != kMelBands) {
    throw ShapeError("mel statistics must be [1 x 80]");
  }
  if ((stddev.array() <= 0.0).any()) throw ParameterError("mel standard deviations must be positive");
  mel_mean_ = mean;
  mel_std_ = stddev;
  RoundToFloat(&mel_mean_);
  RoundToFloat(&mel_std_);
}

}  // namespace emoxfer::model
