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

#ifndef EMOXFER_CLI_COMMANDS_H_
#define EMOXFER_CLI_COMMANDS_H_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "emoxfer/eval/transfer_eval.h"
#include "emoxfer/training/checkpoint.h"
#include "emoxfer/training/corpus.h"
#include "emoxfer/training/session.h"

// Entry points behind the command-line tool. Each command takes its parsed
// options, writes artifacts under its output path and logs to |log|.
namespace emoxfer::cli {

// A manifest (prepared on the fly) or a file written by `preprocess`.
training::PreparedCorpus LoadData(const std::string& path, int vocab_size = 0);

struct MakeToyOptions {
  std::string out;
  std::string spec;  // optional JSON spec; defaults otherwise
  std::optional<uint64_t> seed;
};
toy::ToyCorpusFiles MakeToyCorpus(const MakeToyOptions& o, std::ostream& log);

struct PreprocessOptions {
  std::string manifest;
  std::string out;
  int vocab_size = 0;
};
void Preprocess(const PreprocessOptions& o, std::ostream& log);

struct TrainOptions {
  std::string config;  // optional; the toy profile otherwise
  std::string data;
  std::string out;
  std::string resume;
  std::optional<uint64_t> seed;
  int steps = 0;       // overrides max_steps when > 0
  int stop_after = 0;  // interrupt after this step (for resume tests)
};
training::SessionResult Train(const TrainOptions& o, std::ostream& log);

struct TrainSerOptions {
  std::string config;  // optional; extractor widths are taken from it
  std::string data;
  std::string out;
  int steps = 600;
  int batch_size = 8;
  double learning_rate = 2e-3;
  std::optional<uint64_t> seed;
};
void TrainSerCommand(const TrainSerOptions& o, std::ostream& log);

struct AnalyzeIntensityOptions {
  std::string ser_model;
  std::string data;
  std::string out;
  std::vector<double> alphas{1.01, 1.2, 2.0};
  int bins = 20;
};
void AnalyzeIntensity(const AnalyzeIntensityOptions& o, std::ostream& log);

struct LabelReportOptions {
  std::string ser_model;
  std::string data;
  std::string out;
  std::vector<std::string> speakers;
};
void LabelReportCommand(const LabelReportOptions& o, std::ostream& log);

struct ExportHiddenOptions {
  std::string ser_model;
  std::string data;
  std::string out_matrix;
  std::string out_index;
};
void ExportHiddenCommand(const ExportHiddenOptions& o, std::ostream& log);

// low = 0.1, high = 1, moderate = the checkpoint's median for |emotion|;
// an explicit intensity in [0, 1] wins. Throws ParameterError on an unknown
// level and MissingStatsError when the median is unavailable.
double ResolveIntensity(const std::string& level, std::optional<double> intensity,
                        const training::CheckpointMeta& meta, int emotion);

struct SynthesizeOptions {
  std::string checkpoint;
  std::vector<int> phonemes;
  std::string speaker;
  int emotion = 0;
  std::string level = "moderate";
  std::optional<double> intensity;
  std::string out;
  // Zero-shot checkpoints: reference utterances of |speaker|.
  std::string ref_utterances;
  int ref_count = 5;
  bool preview = false;
  int preview_iterations = 60;
  std::optional<uint64_t> seed;
};
model::SynthesisResult Synthesize(const SynthesizeOptions& o, std::ostream& log);

struct TransferOptions {
  std::string toy_dir;
  std::string out;
  std::string checkpoint;  // trained into |out| when empty
  std::string config;
  bool zero_shot = false;
  int ib_group = 4;
  std::string ref_utterances;  // required in zero-shot mode
  int ref_count = 5;
  std::optional<int> source_emotion;
  std::string target_speaker;
  std::optional<double> intensity;
  int steps = 0;
  std::optional<uint64_t> seed;
  std::string results;  // machine-readable table, appended
  int sentences = 10;
};
eval::TransferReport Transfer(const TransferOptions& o, std::ostream& log);

struct PreviewOptions {
  std::string mel;
  std::string out;
  int iterations = 60;
  std::optional<uint64_t> seed;
};
void Preview(const PreviewOptions& o, std::ostream& log);

struct PlotOptions {
  std::string kind;  // losses | histograms | f0-contours
  std::vector<std::string> inputs;
  std::string out;
};
// Returns the written image paths.
std::vector<std::string> Plot(const PlotOptions& o, std::ostream& log);

}  // namespace emoxfer::cli

#endif  // EMOXFER_CLI_COMMANDS_H_
