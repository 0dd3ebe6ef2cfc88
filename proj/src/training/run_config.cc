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

#include "emoxfer/training/run_config.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "emoxfer/core/error.h"
#include "json.hpp"

namespace emoxfer::training {
namespace {

using nlohmann::json;

void Require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

// Reads known keys from |obj| into their targets and rejects the rest.
class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    Require(obj_.is_object(), where_ + " must be an object");
  }
  ~Reader() = default;

  template <typename T>
  void Get(const char* key, T* out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      *out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void Finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown config key " + where_ + "." + it.key());
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

void ReadExtractor(const json& j, model::ExtractorConfig* c) {
  Reader r(j, "model.extractor");
  std::vector<int> channels(c->channels.begin(), c->channels.end());
  r.Get("channels", &channels);
  Require(channels.size() == 5, "model.extractor.channels must list 5 stages");
  std::copy(channels.begin(), channels.end(), c->channels.begin());
  r.Get("time_strided_stages", &c->time_strided_stages);
  r.Get("gru_hidden", &c->gru_hidden);
  r.Get("hidden_dim", &c->hidden_dim);
  r.Finish();
}

void ReadTimbre(const json& j, model::TimbreConfig* c) {
  Reader r(j, "model.timbre");
  std::string mode = model::TimbreModeName(c->mode);
  r.Get("mode", &mode);
  c->mode = model::ParseTimbreMode(mode);
  r.Get("lstm_hidden", &c->lstm_hidden);
  r.Get("codebook_size", &c->codebook_size);
  r.Get("groups", &c->groups);
  r.Get("commitment", &c->commitment);
  r.Get("ema_decay", &c->ema_decay);
  r.Get("dead_code_steps", &c->dead_code_steps);
  r.Get("recent_buffer", &c->recent_buffer);
  r.Finish();
}

void ReadModel(const json& j, model::ModelConfig* c) {
  Reader r(j, "model");
  r.Get("vocab_size", &c->vocab_size);
  r.Get("num_speakers", &c->num_speakers);
  r.Get("num_emotion_slots", &c->num_emotion_slots);
  r.Get("num_labeled_emotions", &c->num_labeled_emotions);
  r.Get("alpha", &c->alpha);
  r.Get("model_dim", &c->model_dim);
  r.Get("attention_heads", &c->attention_heads);
  r.Get("ffn_filter", &c->ffn_filter);
  r.Get("ffn_kernel", &c->ffn_kernel);
  r.Get("encoder_blocks", &c->encoder_blocks);
  r.Get("decoder_blocks", &c->decoder_blocks);
  r.Get("predictor_layers", &c->predictor_layers);
  r.Get("predictor_kernel", &c->predictor_kernel);
  r.Get("predictor_dropout", &c->predictor_dropout);
  if (const json* e = r.Child("extractor")) ReadExtractor(*e, &c->extractor);
  if (const json* t = r.Child("timbre")) ReadTimbre(*t, &c->timbre);
  r.Finish();
}

void ReadTrain(const json& j, TrainConfig* c) {
  Reader r(j, "train");
  r.Get("batch_size", &c->batch_size);
  r.Get("max_steps", &c->max_steps);
  r.Get("lambda_pros", &c->lambda_pros);
  r.Get("lambda_adv", &c->lambda_adv);
  r.Get("lambda_emo", &c->lambda_emo);
  r.Get("tau_start", &c->tau_start);
  r.Get("tau_end", &c->tau_end);
  r.Get("tau_anneal_fraction", &c->tau_anneal_fraction);
  r.Get("warmup_steps", &c->warmup_steps);
  r.Get("lr_scale", &c->lr_scale);
  r.Get("adam_beta1", &c->adam_beta1);
  r.Get("adam_beta2", &c->adam_beta2);
  r.Get("adam_eps", &c->adam_eps);
  r.Get("grad_clip", &c->grad_clip);
  r.Get("checkpoint_every", &c->checkpoint_every);
  r.Finish();
}

json ToJson(const RunConfig& cfg) {
  const auto& m = cfg.model;
  const auto& t = cfg.train;
  json extractor = {
      {"channels", std::vector<int>(m.extractor.channels.begin(), m.extractor.channels.end())},
      {"time_strided_stages", m.extractor.time_strided_stages},
      {"gru_hidden", m.extractor.gru_hidden},
      {"hidden_dim", m.extractor.hidden_dim}};
  json timbre = {{"mode", model::TimbreModeName(m.timbre.mode)},
                 {"lstm_hidden", m.timbre.lstm_hidden},
                 {"codebook_size", m.timbre.codebook_size},
                 {"groups", m.timbre.groups},
                 {"commitment", m.timbre.commitment},
                 {"ema_decay", m.timbre.ema_decay},
                 {"dead_code_steps", m.timbre.dead_code_steps},
                 {"recent_buffer", m.timbre.recent_buffer}};
  json model = {{"vocab_size", m.vocab_size},
                {"num_speakers", m.num_speakers},
                {"num_emotion_slots", m.num_emotion_slots},
                {"num_labeled_emotions", m.num_labeled_emotions},
                {"alpha", m.alpha},
                {"model_dim", m.model_dim},
                {"attention_heads", m.attention_heads},
                {"ffn_filter", m.ffn_filter},
                {"ffn_kernel", m.ffn_kernel},
                {"encoder_blocks", m.encoder_blocks},
                {"decoder_blocks", m.decoder_blocks},
                {"predictor_layers", m.predictor_layers},
                {"predictor_kernel", m.predictor_kernel},
                {"predictor_dropout", m.predictor_dropout},
                {"extractor", extractor},
                {"timbre", timbre}};
  json train = {{"batch_size", t.batch_size},
                {"max_steps", t.max_steps},
                {"lambda_pros", t.lambda_pros},
                {"lambda_adv", t.lambda_adv},
                {"lambda_emo", t.lambda_emo},
                {"tau_start", t.tau_start},
                {"tau_end", t.tau_end},
                {"tau_anneal_fraction", t.tau_anneal_fraction},
                {"warmup_steps", t.warmup_steps},
                {"lr_scale", t.lr_scale},
                {"adam_beta1", t.adam_beta1},
                {"adam_beta2", t.adam_beta2},
                {"adam_eps", t.adam_eps},
                {"grad_clip", t.grad_clip},
                {"checkpoint_every", t.checkpoint_every}};
  return json{{"seed", cfg.seed}, {"model", model}, {"train", train}};
}

}  // namespace

void TrainConfig::Validate() const {
  Require(batch_size >= 1, "train.batch_size must be at least 1");
  Require(max_steps >= 1, "train.max_steps must be at least 1");
  Require(lambda_pros >= 0 && lambda_adv >= 0 && lambda_emo >= 0, "loss weights must be non-negative");
  Require(tau_start > 0 && tau_end > 0 && tau_start <= 10 && tau_end <= 10, "temperatures must lie in (0, 10]");
  Require(tau_anneal_fraction > 0 && tau_anneal_fraction <= 1, "tau_anneal_fraction must lie in (0, 1]");
  Require(warmup_steps >= 1, "warmup_steps must be at least 1");
  Require(lr_scale >= 0, "lr_scale must be non-negative");
  Require(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1, "Adam betas must lie in [0, 1)");
  Require(adam_eps > 0, "adam_eps must be positive");
  Require(grad_clip > 0, "grad_clip must be positive");
  Require(checkpoint_every >= 0, "checkpoint_every must be non-negative");
}

void RunConfig::Validate() const {
  model.Validate();
  train.Validate();
}

RunConfig RunConfig::Toy() {
  RunConfig c;
  c.model = model::ModelConfig::Toy();
  c.model.vocab_size = 16;  // toy corpus alphabet
  c.train.batch_size = 8;
  c.train.warmup_steps = 400;
  return c;
}

RunConfig ParseRunConfig(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig cfg;
  Reader r(j, "config");
  r.Get("seed", &cfg.seed);
  if (const json* m = r.Child("model")) ReadModel(*m, &cfg.model);
  if (const json* t = r.Child("train")) ReadTrain(*t, &cfg.train);
  r.Finish();
  cfg.Validate();
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ParseRunConfig(ss.str());
}

std::string DumpRunConfig(const RunConfig& cfg) { return ToJson(cfg).dump(); }

std::string ConfigHash(const RunConfig& cfg) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : DumpRunConfig(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace emoxfer::training
