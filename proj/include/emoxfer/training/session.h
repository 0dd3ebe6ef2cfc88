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

#ifndef EMOXFER_TRAINING_SESSION_H_
#define EMOXFER_TRAINING_SESSION_H_

#include <iosfwd>
#include <string>

#include "emoxfer/training/corpus.h"
#include "emoxfer/training/run_config.h"
#include "emoxfer/training/trainer.h"

namespace emoxfer::training {

struct SessionOptions {
  std::string out_dir;      // receives model.ckpt and train.log
  std::string resume_from;  // checkpoint to continue from; empty for a fresh run
  // Stop after this step even if max_steps is larger (simulates an
  // interrupted run); 0 disables.
  int stop_after = 0;
  std::ostream* progress = nullptr;
  int progress_every = 250;
};

struct SessionResult {
  std::string checkpoint_path;
  std::string log_path;
  StepStats last;
};

// Trains on |corpus| up to cfg.train.max_steps. The model's speaker count is
// taken from the corpus. A fresh run truncates train.log; a resumed run
// appends to it. The checkpoint stores the corpus statistics and the
// per-emotion intensity medians.
SessionResult RunTraining(RunConfig cfg, const PreparedCorpus& corpus, const SessionOptions& opts);

}  // namespace emoxfer::training

#endif  // EMOXFER_TRAINING_SESSION_H_
