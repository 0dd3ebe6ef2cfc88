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

#include "emoxfer/cli/app.h"

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "emoxfer/cli/commands.h"
#include "emoxfer/core/error.h"

namespace emoxfer::cli {
namespace {

std::vector<int> ParsePhonemes(const std::string& text) {
  std::string spaced = text;
  for (char& c : spaced) {
    if (c == ',') c = ' ';
  }
  std::istringstream is(spaced);
  std::vector<int> out;
  std::string tok;
  while (is >> tok) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used != tok.size()) throw ParameterError("malformed phoneme id '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotion transfer toolkit: toy corpora, training, synthesis and intensity analysis."};
  app.require_subcommand(1);
  std::optional<uint64_t> seed;
  app.add_option("--seed", seed, "Seed overriding the config/spec seed");

  MakeToyOptions toy;
  auto* c_toy = app.add_subcommand("make-toy-corpus", "Synthesize the toy corpus (WAV, alignments, manifests)");
  c_toy->add_option("--out", toy.out, "Output directory")->required();
  c_toy->add_option("--spec", toy.spec, "JSON corpus spec");

  PreprocessOptions pre;
  auto* c_pre = app.add_subcommand("preprocess", "Extract mels and prosody features from a manifest");
  c_pre->add_option("--manifest", pre.manifest, "Manifest TSV")->required();
  c_pre->add_option("--out", pre.out, "Prepared corpus file")->required();
  c_pre->add_option("--vocab-size", pre.vocab_size, "Reject phoneme ids at or above this");

  TrainOptions train;
  auto* c_train = app.add_subcommand("train", "Train the emotion transfer model");
  c_train->add_option("--config", train.config, "Run config JSON (toy profile by default)");
  c_train->add_option("--data", train.data, "Manifest or prepared corpus")->required();
  c_train->add_option("--out", train.out, "Output directory (model.ckpt, train.log)")->required();
  c_train->add_option("--resume", train.resume, "Checkpoint to resume from");
  c_train->add_option("--steps", train.steps, "Override max_steps");
  c_train->add_option("--stop-after", train.stop_after, "Stop after this step");

  TrainSerOptions ser;
  auto* c_ser = app.add_subcommand("train-ser", "Train the standalone emotion classifier");
  c_ser->add_option("--config", ser.config, "Run config JSON (extractor widths)");
  c_ser->add_option("--data", ser.data, "Labeled manifest or prepared corpus")->required();
  c_ser->add_option("--out", ser.out, "Classifier file")->required();
  c_ser->add_option("--steps", ser.steps, "Training steps");
  c_ser->add_option("--batch-size", ser.batch_size, "Batch size");
  c_ser->add_option("--lr", ser.learning_rate, "Learning rate");

  AnalyzeIntensityOptions ai;
  auto* c_ai = app.add_subcommand("analyze-intensity", "Histogram posterior intensities across alphas");
  c_ai->add_option("--ser-model", ai.ser_model, "Classifier file")->required();
  c_ai->add_option("--data", ai.data, "Manifest or prepared corpus")->required();
  c_ai->add_option("--out", ai.out, "Report TSV")->required();
  c_ai->add_option("--alphas", ai.alphas, "Modified-softmax bases")->delimiter(',');
  c_ai->add_option("--bins", ai.bins, "Histogram bins");

  LabelReportOptions lr;
  auto* c_lr = app.add_subcommand("label-report", "Per-speaker predicted emotion percentages");
  c_lr->add_option("--ser-model", lr.ser_model, "Classifier file")->required();
  c_lr->add_option("--data", lr.data, "Manifest or prepared corpus")->required();
  c_lr->add_option("--out", lr.out, "Report TSV")->required();
  c_lr->add_option("--speakers", lr.speakers, "Speakers to report, in order")->delimiter(',');

  ExportHiddenOptions eh;
  auto* c_eh = app.add_subcommand("export-hidden", "Export classifier hidden features");
  c_eh->add_option("--ser-model", eh.ser_model, "Classifier file")->required();
  c_eh->add_option("--data", eh.data, "Manifest or prepared corpus")->required();
  c_eh->add_option("--out-matrix", eh.out_matrix, "Float32 matrix file")->required();
  c_eh->add_option("--out-index", eh.out_index, "Index TSV")->required();

  SynthesizeOptions syn;
  std::string phonemes;
  auto* c_syn = app.add_subcommand("synthesize", "Synthesize a mel spectrogram with emotion and intensity");
  c_syn->add_option("--checkpoint", syn.checkpoint, "Model checkpoint")->required();
  c_syn->add_option("--text-phonemes", phonemes, "Phoneme ids, space or comma separated")->required();
  c_syn->add_option("--speaker", syn.speaker, "Target speaker")->required();
  c_syn->add_option("--emotion", syn.emotion, "Emotion label")->required();
  auto* level = c_syn->add_option("--level", syn.level, "low | moderate | high")
                    ->check(CLI::IsMember({"low", "moderate", "high"}));
  c_syn->add_option("--intensity", syn.intensity, "Explicit intensity in [0, 1]")->excludes(level);
  c_syn->add_option("--out", syn.out, "Output directory")->required();
  c_syn->add_option("--ref-utterances", syn.ref_utterances, "Reference manifest or corpus (zero-shot)");
  c_syn->add_option("--ref-count", syn.ref_count, "Reference utterances to average");
  c_syn->add_flag("--preview", syn.preview, "Also write a Griffin-Lim preview");
  c_syn->add_option("--preview-iterations", syn.preview_iterations, "Griffin-Lim iterations");

  TransferOptions tr;
  auto* c_tr = app.add_subcommand("transfer", "Cross-speaker emotion transfer on a toy corpus, with metrics");
  c_tr->add_option("--toy-dir", tr.toy_dir, "Directory written by make-toy-corpus")->required();
  c_tr->add_option("--out", tr.out, "Output directory")->required();
  c_tr->add_option("--checkpoint", tr.checkpoint, "Trained checkpoint (trains one when omitted)");
  c_tr->add_option("--config", tr.config, "Run config JSON for training");
  c_tr->add_flag("--zero-shot", tr.zero_shot, "Quantized timbre from reference utterances");
  c_tr->add_option("--ib-group", tr.ib_group, "Quantizer groups G (2, 4 or 8)");
  c_tr->add_option("--ref-utterances", tr.ref_utterances, "Reference manifest or corpus (zero-shot)");
  c_tr->add_option("--ref-count", tr.ref_count, "Reference utterances per target speaker");
  c_tr->add_option("--source-emotion", tr.source_emotion, "Only this emotion");
  c_tr->add_option("--target-speaker", tr.target_speaker, "Only this target speaker");
  c_tr->add_option("--intensity", tr.intensity, "Fixed intensity (stored median otherwise)");
  c_tr->add_option("--steps", tr.steps, "Override max_steps when training");
  c_tr->add_option("--sentences", tr.sentences, "Test sentences per pair");
  c_tr->add_option("--results", tr.results, "Results table to append to");

  PreviewOptions pv;
  auto* c_pv = app.add_subcommand("preview", "Griffin-Lim audio preview of a mel file");
  c_pv->add_option("--mel", pv.mel, "Log-mel matrix file")->required();
  c_pv->add_option("--out", pv.out, "WAV file")->required();
  c_pv->add_option("--iterations", pv.iterations, "Griffin-Lim iterations");

  PlotOptions pl;
  auto* c_pl = app.add_subcommand("plot", "Render SVG plots");
  c_pl->add_option("kind", pl.kind, "losses | histograms | f0-contours")
      ->required()
      ->check(CLI::IsMember({"losses", "histograms", "f0-contours"}));
  c_pl->add_option("--input", pl.inputs, "Training log, intensity report, or mel files")->required();
  c_pl->add_option("--out", pl.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_toy->parsed()) {
      toy.seed = seed;
      MakeToyCorpus(toy, err);
    } else if (c_pre->parsed()) {
      Preprocess(pre, err);
    } else if (c_train->parsed()) {
      train.seed = seed;
      Train(train, err);
    } else if (c_ser->parsed()) {
      ser.seed = seed;
      TrainSerCommand(ser, err);
    } else if (c_ai->parsed()) {
      AnalyzeIntensity(ai, err);
    } else if (c_lr->parsed()) {
      LabelReportCommand(lr, err);
    } else if (c_eh->parsed()) {
      ExportHiddenCommand(eh, err);
    } else if (c_syn->parsed()) {
      syn.seed = seed;
      syn.phonemes = ParsePhonemes(phonemes);
      Synthesize(syn, err);
    } else if (c_tr->parsed()) {
      tr.seed = seed;
      Transfer(tr, err);
    } else if (c_pv->parsed()) {
      pv.seed = seed;
      Preview(pv, err);
    } else if (c_pl->parsed()) {
      Plot(pl, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace emoxfer::cli
