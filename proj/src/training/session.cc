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

#include "emoxfer/training/session.h"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "emoxfer/core/error.h"
#include "emoxfer/training/checkpoint.h"

namespace emoxfer::training {

SessionResult RunTraining(RunConfig cfg, const PreparedCorpus& corpus, const SessionOptions& opts) {
  namespace fs = std::filesystem;
  cfg.model.num_speakers = static_cast<int>(corpus.speakers.size());
  cfg.Validate();
  fs::create_directories(opts.out_dir);
  SessionResult result;
  result.checkpoint_path = (fs::path(opts.out_dir) / "model.ckpt").string();
  result.log_path = (fs::path(opts.out_dir) / "train.log").string();

  model::EmotionTransferModel model(cfg.model, cfg.seed);
  model.SetMelStats(corpus.mel_mean, corpus.mel_std);
  Trainer trainer(model, cfg, BuildExamples(corpus));

  std::ios::openmode mode = std::ios::out;
  if (!opts.resume_from.empty()) {
    const Checkpoint ckpt = ReadCheckpoint(opts.resume_from);
    for (const auto& w : ckpt.warnings) {
      if (opts.progress) *opts.progress << "warning: " << w << '\n';
    }
    if (auto w = HashWarning(ckpt, cfg); w && opts.progress) *opts.progress << "warning: " << *w << '\n';
    if (ckpt.meta.speakers != corpus.speakers) throw CheckpointError("checkpoint speakers differ from the corpus");
    RestoreModel(ckpt, &model);
    RestoreOptimizer(ckpt, &trainer.optimizer());
    trainer.set_step(ckpt.meta.step);
    mode |= std::ios::app;
  } else {
    mode |= std::ios::trunc;
  }
  std::ofstream log(result.log_path, mode);
  if (!log) throw Error("cannot open " + result.log_path);

  auto save = [&]() {
    CheckpointMeta meta;
    meta.step = trainer.step();
    meta.speakers = corpus.speakers;
    meta.speaker_stats = corpus.stats;
    meta.intensity_medians = ComputeIntensityMedians(model, trainer.examples(), cfg.model.alpha);
    SaveCheckpoint(result.checkpoint_path, cfg, model, &trainer.optimizer(), meta);
  };

  const int last = opts.stop_after > 0 ? std::min(opts.stop_after, cfg.train.max_steps) : cfg.train.max_steps;
  trainer.Run(last, &log, [&](const StepStats& s) {
    result.last = s;
    if (opts.progress && opts.progress_every > 0 && s.step % opts.progress_every == 0) {
      *opts.progress << "step " << s.step << " l_mel " << s.loss.l_mel << " l_pros " << s.loss.l_pros << " l_adv "
                     << s.loss.l_adv_spk << " l_emo " << s.loss.l_emo_source << " total " << s.loss.total << '\n';
    }
    if (cfg.train.checkpoint_every > 0 && s.step % cfg.train.checkpoint_every == 0 && s.step != last) save();
  });
  save();
  return result;
}

}  // namespace emoxfer::training
