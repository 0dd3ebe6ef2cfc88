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

#ifndef EMOXFER_TOY_TOY_CORPUS_H_
#define EMOXFER_TOY_TOY_CORPUS_H_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "emoxfer/dsp/audio.h"

// Synthetic harmonic-plus-noise corpus with known ground truth: speakers
// differ only in spectral envelope (formants below 3.5 kHz, tilt) and
// prosody statistics, emotions only in prosody templates (F0 contour, tempo,
// energy), phonemes only in high-band resonances and base duration.
namespace emoxfer::toy {

enum class ContourShape { kDeclination, kArch, kWave, kRise };

// Unit-amplitude contour at relative utterance position u in [0, 1].
double ContourValue(ContourShape shape, double u);

struct EmotionTemplate {
  std::string name;
  ContourShape contour = ContourShape::kDeclination;
  double f0_amplitude = 0.2;  // log-F0 units at strength 1
  double f0_offset = 0.0;     // log-F0 shift at strength 1
  double tempo = 1.0;         // > 1 speaks faster
  double energy_db = 0.0;
};

// neutral, happy, sad, angry.
std::vector<EmotionTemplate> DefaultTemplates();

struct ToyCorpusSpec {
  int n_source_speakers = 4;
  int n_target_speakers = 2;
  int n_emotions = 4;  // template 0 is neutrality
  int utterances_per_cell = 12;  // per source speaker and emotion
  int target_utterances = 40;    // per target speaker, neutral only
  int phonemes_per_utterance = 12;
  int vocab_size = 16;
  // This emotion is recorded by a single source speaker only; -1 disables.
  int bound_emotion = 3;
  int bound_speaker = 0;
  uint64_t seed = 1;
  std::vector<EmotionTemplate> templates = DefaultTemplates();

  // Throws ParameterError on inconsistent settings.
  void Validate() const;
};

struct SpeakerVoice {
  std::string name;
  bool source = true;
  double f0_hz = 140.0;
  double f0_range = 1.0;        // scales template log-F0 excursions
  double duration_scale = 1.0;  // multiplies phoneme durations
  double level_db = 0.0;
  std::array<double, 3> formants{};
  double tilt_db_per_octave = 0.0;
  std::vector<int> emotions;  // templates this speaker records
};

struct ToyUtterance {
  std::string id;
  int speaker = 0;
  int emotion = 0;
  double strength = 1.0;  // scales every template knob
  std::vector<int> phonemes;
  std::vector<int> durations;  // frames
};

struct ToyCorpus {
  ToyCorpusSpec spec;
  std::vector<SpeakerVoice> speakers;  // sources first
  std::vector<int> base_durations;     // per phoneme symbol, frames
  std::vector<ToyUtterance> utterances;
};

// Deterministic in |spec| (including the seed).
ToyCorpus PlanCorpus(const ToyCorpusSpec& spec);

// round(base * speaker scale / tempo^strength), at least 2 frames.
std::vector<int> PhonemeDurations(const ToyCorpus& corpus, int speaker, const EmotionTemplate& tmpl, double strength,
                                  const std::vector<int>& phonemes);

// Relative utterance position of every frame centre: phoneme index plus the
// fraction of that phoneme elapsed at the frame midpoint, over the phoneme
// count.
std::vector<double> RelativePositions(const std::vector<int>& durations);
// Unit-amplitude template contour sampled at every frame.
std::vector<double> TemplateContour(const EmotionTemplate& tmpl, const std::vector<int>& durations);

// Frame count (durations) * 200 + 600 samples so that the mel analysis
// yields exactly sum(durations) frames.
dsp::AudioClip RenderUtterance(const ToyCorpus& corpus, const ToyUtterance& utt);

struct ToyCorpusFiles {
  std::string all_manifest;     // sources and targets
  std::string source_manifest;  // labeled source speakers only
  std::string target_manifest;  // unlabeled target speakers only
};

// JSON form of a spec (pretty-printed). Parsing rejects unknown keys and
// invalid settings with ConfigError; a "speakers" array is accepted and
// ignored since voices derive from the seed.
std::string DumpToyCorpusSpec(const ToyCorpusSpec& spec);
ToyCorpusSpec ParseToyCorpusSpec(const std::string& json_text);

// Re-plans the corpus written under |dir| from its corpus.json.
ToyCorpus ReadToyCorpus(const std::string& dir);

// Writes wav/<id>.wav, wav/<id>.ali, the three manifests and corpus.json
// under |dir|.
ToyCorpusFiles WriteToyCorpus(const ToyCorpus& corpus, const std::string& dir);

}  // namespace emoxfer::toy

#endif  // EMOXFER_TOY_TOY_CORPUS_H_
