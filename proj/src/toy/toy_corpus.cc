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

#include "emoxfer/toy/toy_corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"
#include "emoxfer/dsp/corpus_io.h"
#include "json.hpp"

namespace emoxfer::toy {
namespace {

constexpr int kShift = 200;
constexpr int kFrameLength = 800;
constexpr double kMaxHarmonicHz = 7600.0;
constexpr double kBaseGainDb = -22.0;
constexpr double kNoiseAmplitude = 2e-3;

// Stream tags for the generator's independent random draws.
enum Stream : uint64_t { kSpeakers = 1, kPhonemes = 2, kUtterances = 3, kNoise = 4 };

struct PhonemeTimbre {
  double c1, c2, gain_db;
};

std::vector<PhonemeTimbre> PhonemeTimbres(const ToyCorpusSpec& spec) {
  Rng rng(MixSeed(spec.seed, kPhonemes));
  std::vector<PhonemeTimbre> out(static_cast<size_t>(spec.vocab_size));
  for (auto& t : out) {
    t.c1 = rng.Uniform(3600.0, 5200.0);
    t.c2 = rng.Uniform(5400.0, 7200.0);
    t.gain_db = rng.Uniform(-3.0, 3.0);
  }
  return out;
}

double Bump(double f, double centre, double width) {
  const double x = (f - centre) / width;
  return std::exp(-0.5 * x * x);
}

double SpeakerEnvelopeDb(const SpeakerVoice& v, double f) {
  static constexpr double kWidths[3] = {110.0, 160.0, 220.0};
  double db = v.tilt_db_per_octave * std::log2(std::max(f, 50.0) / 500.0);
  for (int j = 0; j < 3; ++j) db += 18.0 * Bump(f, v.formants[static_cast<size_t>(j)], kWidths[j]);
  return db;
}

double PhonemeEnvelopeDb(const PhonemeTimbre& t, double f) {
  return t.gain_db + 15.0 * (Bump(f, t.c1, 350.0) + Bump(f, t.c2, 350.0));
}

uint64_t Fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string Pad3(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", i);
  return buf;
}

}  // namespace

double ContourValue(ContourShape shape, double u) {
  switch (shape) {
    case ContourShape::kDeclination:
      return 1.0 - 2.0 * u;
    case ContourShape::kArch:
      return 1.0 - (2.0 * u - 1.0) * (2.0 * u - 1.0) - 2.0 / 3.0;
    case ContourShape::kWave:
      return std::cos(3.0 * std::numbers::pi * u);
    case ContourShape::kRise:
      return 2.0 * u - 1.0;
  }
  return 0.0;
}

std::vector<EmotionTemplate> DefaultTemplates() {
  return {
      {"neutral", ContourShape::kDeclination, 0.20, 0.00, 1.00, 0.0},
      {"happy", ContourShape::kArch, 0.40, 0.08, 1.15, 3.0},
      {"sad", ContourShape::kWave, 0.25, -0.10, 0.80, -5.0},
      {"angry", ContourShape::kRise, 0.35, 0.12, 1.10, 6.0},
  };
}

void ToyCorpusSpec::Validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ParameterError("toy corpus: " + msg);
  };
  require(n_source_speakers >= 1, "need at least one source speaker");
  require(n_target_speakers >= 0, "target speaker count must be non-negative");
  require(n_emotions >= 2 && n_emotions <= static_cast<int>(templates.size()),
          "n_emotions must lie in [2, number of templates]");
  require(utterances_per_cell >= 1 && target_utterances >= 0, "utterance counts must be positive");
  require(phonemes_per_utterance >= 2, "need at least two phonemes per utterance");
  require(vocab_size >= 2, "vocab_size must be at least 2");
  require(bound_emotion == -1 || (bound_emotion >= 1 && bound_emotion < n_emotions),
          "bound_emotion must be a non-neutral template or -1");
  require(bound_speaker >= 0 && bound_speaker < n_source_speakers, "bound_speaker must be a source speaker");
  for (const auto& t : templates) require(t.tempo > 0.0, "template tempo must be positive");
}

ToyCorpus PlanCorpus(const ToyCorpusSpec& spec) {
  spec.Validate();
  ToyCorpus c;
  c.spec = spec;

  Rng vr(MixSeed(spec.seed, kSpeakers));
  const int total = spec.n_source_speakers + spec.n_target_speakers;
  std::vector<std::array<double, 3>> unit;  // formants in [0,1]^3, kept apart
  for (int s = 0; s < total; ++s) {
    SpeakerVoice v;
    v.source = s < spec.n_source_speakers;
    v.name = v.source ? "src" + std::to_string(s) : "tgt" + std::to_string(s - spec.n_source_speakers);
    std::array<double, 3> u{};
    for (int attempt = 0;; ++attempt) {
      for (double& x : u) x = vr.Uniform(0.0, 1.0);
      double nearest = 1e9;
      for (const auto& o : unit) {
        double d = 0.0;
        for (int j = 0; j < 3; ++j) d += (u[j] - o[j]) * (u[j] - o[j]);
        nearest = std::min(nearest, std::sqrt(d));
      }
      if (nearest >= 0.35 || attempt >= 1000) break;
    }
    unit.push_back(u);
    v.formants = {650.0 + 300.0 * u[0], 1200.0 + 1000.0 * u[1], 2500.0 + 900.0 * u[2]};
    v.f0_hz = vr.Uniform(100.0, 190.0);
    v.f0_range = vr.Uniform(0.8, 1.2);
    v.duration_scale = vr.Uniform(0.9, 1.1);
    v.level_db = vr.Uniform(-3.0, 3.0);
    v.tilt_db_per_octave = vr.Uniform(-2.0, 2.0);
    if (v.source) {
      for (int e = 0; e < spec.n_emotions; ++e) {
        if (e == spec.bound_emotion && s != spec.bound_speaker) continue;
        v.emotions.push_back(e);
      }
    } else {
      v.emotions = {0};
    }
    c.speakers.push_back(v);
  }

  Rng pr(MixSeed(spec.seed, kPhonemes + 100));
  c.base_durations.resize(static_cast<size_t>(spec.vocab_size));
  for (int& d : c.base_durations) d = 5 + pr.UniformInt(5);

  int serial = 0;
  for (int s = 0; s < total; ++s) {
    const SpeakerVoice& v = c.speakers[static_cast<size_t>(s)];
    for (int e : v.emotions) {
      const int count = v.source ? spec.utterances_per_cell : spec.target_utterances;
      for (int i = 0; i < count; ++i) {
        Rng ur(MixSeed(MixSeed(spec.seed, kUtterances), static_cast<uint64_t>(serial++)));
        ToyUtterance u;
        u.speaker = s;
        u.emotion = e;
        u.id = v.name + "_" + spec.templates[static_cast<size_t>(e)].name + "_" + Pad3(i);
        u.strength = e == 0 ? ur.Uniform(0.8, 1.2) : ur.Uniform(0.5, 1.5);
        for (int k = 0; k < spec.phonemes_per_utterance; ++k) u.phonemes.push_back(ur.UniformInt(spec.vocab_size));
        u.durations = PhonemeDurations(c, s, spec.templates[static_cast<size_t>(e)], u.strength, u.phonemes);
        c.utterances.push_back(std::move(u));
      }
    }
  }
  return c;
}

std::vector<int> PhonemeDurations(const ToyCorpus& corpus, int speaker, const EmotionTemplate& tmpl, double strength,
                                  const std::vector<int>& phonemes) {
  const double scale = corpus.speakers.at(static_cast<size_t>(speaker)).duration_scale / std::pow(tmpl.tempo, strength);
  std::vector<int> out;
  out.reserve(phonemes.size());
  for (int p : phonemes) {
    const double d = corpus.base_durations.at(static_cast<size_t>(p)) * scale;
    out.push_back(std::max(2, static_cast<int>(std::lround(d))));
  }
  return out;
}

std::vector<double> RelativePositions(const std::vector<int>& durations) {
  std::vector<double> u;
  const double n = static_cast<double>(durations.size());
  for (size_t i = 0; i < durations.size(); ++i) {
    for (int t = 0; t < durations[i]; ++t) u.push_back((static_cast<double>(i) + (t + 0.5) / durations[i]) / n);
  }
  return u;
}

std::vector<double> TemplateContour(const EmotionTemplate& tmpl, const std::vector<int>& durations) {
  std::vector<double> out;
  for (double u : RelativePositions(durations)) out.push_back(ContourValue(tmpl.contour, u));
  return out;
}

dsp::AudioClip RenderUtterance(const ToyCorpus& corpus, const ToyUtterance& utt) {
  const SpeakerVoice& v = corpus.speakers.at(static_cast<size_t>(utt.speaker));
  const EmotionTemplate& tmpl = corpus.spec.templates.at(static_cast<size_t>(utt.emotion));
  const std::vector<PhonemeTimbre> timbres = PhonemeTimbres(corpus.spec);

  const int n = static_cast<int>(utt.phonemes.size());
  std::vector<int> start(static_cast<size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) start[static_cast<size_t>(i) + 1] = start[static_cast<size_t>(i)] + utt.durations[static_cast<size_t>(i)];
  const int frames = start.back();
  const int samples = frames * kShift + (kFrameLength - kShift);

  // Continuous frame position p of a sample (frame t is centred on sample
  // 200 t + 400), mapped to the phoneme index and relative position.
  auto locate = [&](double sample, int* phoneme) {
    const double p = std::clamp((sample - kFrameLength / 2.0) / kShift + 0.5, 0.0, frames - 1e-9);
    int i = static_cast<int>(std::upper_bound(start.begin(), start.end(), static_cast<int>(p)) - start.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    *phoneme = i;
    const double frac = (p - start[static_cast<size_t>(i)]) / utt.durations[static_cast<size_t>(i)];
    return (i + frac) / n;
  };
  auto log_f0_at = [&](double u) {
    return std::log(v.f0_hz) +
           v.f0_range * utt.strength * (tmpl.f0_amplitude * ContourValue(tmpl.contour, u) + tmpl.f0_offset);
  };

  // Harmonic amplitudes on a control grid every 100 samples.
  constexpr int kGrid = 100;
  const int controls = samples / kGrid + 2;
  const int max_k = static_cast<int>(kMaxHarmonicHz / 50.0);
  std::vector<std::vector<double>> amp(static_cast<size_t>(controls), std::vector<double>(static_cast<size_t>(max_k), 0.0));
  for (int c = 0; c < controls; ++c) {
    int ph = 0;
    const double u = locate(static_cast<double>(c) * kGrid, &ph);
    const double f0 = std::exp(log_f0_at(u));
    const PhonemeTimbre& pt = timbres[static_cast<size_t>(utt.phonemes[static_cast<size_t>(ph)])];
    const double gain_db = kBaseGainDb + v.level_db + utt.strength * tmpl.energy_db;
    for (int k = 1; k <= max_k; ++k) {
      const double f = k * f0;
      if (f >= kMaxHarmonicHz) break;
      const double db = gain_db - 40.0 * std::log10(k) + SpeakerEnvelopeDb(v, f) + PhonemeEnvelopeDb(pt, f);
      amp[static_cast<size_t>(c)][static_cast<size_t>(k) - 1] = std::pow(10.0, db / 20.0);
    }
  }

  Rng noise(MixSeed(MixSeed(corpus.spec.seed, kNoise), Fnv1a(utt.id)));
  dsp::AudioClip clip;
  clip.samples.resize(static_cast<size_t>(samples));
  double phase = 0.0;
  for (int s = 0; s < samples; ++s) {
    int ph = 0;
    const double f0 = std::exp(log_f0_at(locate(s, &ph)));
    phase = std::fmod(phase + 2.0 * std::numbers::pi * f0 / dsp::kSampleRate, 2.0 * std::numbers::pi);
    const std::complex<double> step(std::cos(phase), std::sin(phase));
    std::complex<double> z = step;
    const int c = s / kGrid;
    const double w = static_cast<double>(s % kGrid) / kGrid;
    const auto& a0 = amp[static_cast<size_t>(c)];
    const auto& a1 = amp[static_cast<size_t>(c) + 1];
    double acc = 0.0;
    for (int k = 0; k < max_k; ++k) {
      const double a = (1.0 - w) * a0[static_cast<size_t>(k)] + w * a1[static_cast<size_t>(k)];
      if (a0[static_cast<size_t>(k)] == 0.0 && a1[static_cast<size_t>(k)] == 0.0) break;
      acc += a * z.imag();
      z *= step;
    }
    clip.samples[static_cast<size_t>(s)] = std::clamp(acc + kNoiseAmplitude * noise.Normal(), -0.99, 0.99);
  }
  return clip;
}

ToyCorpusFiles WriteToyCorpus(const ToyCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "wav");
  std::vector<dsp::UtteranceRecord> all, sources, targets;
  for (const auto& u : corpus.utterances) {
    const std::string rel = "wav/" + u.id + ".wav";
    dsp::WriteWav((fs::path(dir) / rel).string(), RenderUtterance(corpus, u));
    dsp::WriteAlignment(dsp::AlignmentPathFor((fs::path(dir) / rel).string()), {u.phonemes, u.durations});
    dsp::UtteranceRecord r;
    r.audio_path = rel;
    r.speaker_id = corpus.speakers[static_cast<size_t>(u.speaker)].name;
    r.phoneme_ids = u.phonemes;
    const bool source = corpus.speakers[static_cast<size_t>(u.speaker)].source;
    if (source) r.emotion_label = u.emotion;
    all.push_back(r);
    (source ? sources : targets).push_back(r);
  }
  ToyCorpusFiles files;
  files.all_manifest = (fs::path(dir) / "all.tsv").string();
  files.source_manifest = (fs::path(dir) / "source.tsv").string();
  files.target_manifest = (fs::path(dir) / "target.tsv").string();
  dsp::WriteManifest(files.all_manifest, all);
  dsp::WriteManifest(files.source_manifest, sources);
  dsp::WriteManifest(files.target_manifest, targets);

  nlohmann::ordered_json j = nlohmann::ordered_json::parse(DumpToyCorpusSpec(corpus.spec));
  j["speakers"] = nlohmann::ordered_json::array();
  for (const auto& v : corpus.speakers) {
    j["speakers"].push_back({{"name", v.name},
                             {"source", v.source},
                             {"f0_hz", v.f0_hz},
                             {"f0_range", v.f0_range},
                             {"duration_scale", v.duration_scale},
                             {"level_db", v.level_db},
                             {"formants", v.formants},
                             {"tilt_db_per_octave", v.tilt_db_per_octave},
                             {"emotions", v.emotions}});
  }
  std::ofstream os(fs::path(dir) / "corpus.json");
  os << j.dump(2) << '\n';
  if (!os) throw Error("cannot write corpus.json in " + dir);
  return files;
}

std::string DumpToyCorpusSpec(const ToyCorpusSpec& spec) {
  nlohmann::ordered_json j;
  j["seed"] = spec.seed;
  j["n_source_speakers"] = spec.n_source_speakers;
  j["n_target_speakers"] = spec.n_target_speakers;
  j["n_emotions"] = spec.n_emotions;
  j["utterances_per_cell"] = spec.utterances_per_cell;
  j["target_utterances"] = spec.target_utterances;
  j["phonemes_per_utterance"] = spec.phonemes_per_utterance;
  j["vocab_size"] = spec.vocab_size;
  j["bound_emotion"] = spec.bound_emotion;
  j["bound_speaker"] = spec.bound_speaker;
  j["emotions"] = nlohmann::ordered_json::array();
  for (size_t e = 0; e < spec.templates.size(); ++e) {
    const auto& t = spec.templates[e];
    j["emotions"].push_back({{"id", e},
                             {"name", t.name},
                             {"contour", static_cast<int>(t.contour)},
                             {"f0_amplitude", t.f0_amplitude},
                             {"f0_offset", t.f0_offset},
                             {"tempo", t.tempo},
                             {"energy_db", t.energy_db}});
  }
  return j.dump(2);
}

ToyCorpusSpec ParseToyCorpusSpec(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("toy corpus spec: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("toy corpus spec must be a JSON object");
  ToyCorpusSpec spec;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") {
        spec.seed = value.get<uint64_t>();
      } else if (key == "n_source_speakers") {
        spec.n_source_speakers = value.get<int>();
      } else if (key == "n_target_speakers") {
        spec.n_target_speakers = value.get<int>();
      } else if (key == "n_emotions") {
        spec.n_emotions = value.get<int>();
      } else if (key == "utterances_per_cell") {
        spec.utterances_per_cell = value.get<int>();
      } else if (key == "target_utterances") {
        spec.target_utterances = value.get<int>();
      } else if (key == "phonemes_per_utterance") {
        spec.phonemes_per_utterance = value.get<int>();
      } else if (key == "vocab_size") {
        spec.vocab_size = value.get<int>();
      } else if (key == "bound_emotion") {
        spec.bound_emotion = value.get<int>();
      } else if (key == "bound_speaker") {
        spec.bound_speaker = value.get<int>();
      } else if (key == "speakers") {
        // Derived from the seed; written for reference only.
      } else if (key == "emotions") {
        spec.templates.clear();
        for (const auto& e : value) {
          EmotionTemplate t;
          for (const auto& [k, v] : e.items()) {
            if (k == "id") {
              if (v.get<size_t>() != spec.templates.size()) throw ConfigError("emotion ids must be 0, 1, ...");
            } else if (k == "name") {
              t.name = v.get<std::string>();
            } else if (k == "contour") {
              const int c = v.get<int>();
              if (c < 0 || c > static_cast<int>(ContourShape::kRise)) throw ConfigError("unknown contour shape");
              t.contour = static_cast<ContourShape>(c);
            } else if (k == "f0_amplitude") {
              t.f0_amplitude = v.get<double>();
            } else if (k == "f0_offset") {
              t.f0_offset = v.get<double>();
            } else if (k == "tempo") {
              t.tempo = v.get<double>();
            } else if (k == "energy_db") {
              t.energy_db = v.get<double>();
            } else {
              throw ConfigError("toy corpus spec: unknown emotion key '" + k + "'");
            }
          }
          spec.templates.push_back(t);
        }
      } else {
        throw ConfigError("toy corpus spec: unknown key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("toy corpus spec: ") + e.what());
  }
  try {
    spec.Validate();
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

ToyCorpus ReadToyCorpus(const std::string& dir) {
  const std::filesystem::path path = std::filesystem::path(dir) / "corpus.json";
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  ToyCorpus c = PlanCorpus(ParseToyCorpusSpec(ss.str()));
  const nlohmann::json j = nlohmann::json::parse(ss.str());
  if (j.contains("speakers")) {
    const auto& names = j["speakers"];
    bool same = names.size() == c.speakers.size();
    for (size_t i = 0; same && i < names.size(); ++i) same = names[i].value("name", "") == c.speakers[i].name;
    if (!same) throw DataError(path.string() + ": speakers do not match the regenerated plan");
  }
  return c;
}

}  // namespace emoxfer::toy
