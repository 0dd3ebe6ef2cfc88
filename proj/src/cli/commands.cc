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

#include "emoxfer/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "emoxfer/cli/svg.h"
#include "emoxfer/core/error.h"
#include "emoxfer/dsp/griffin_lim.h"
#include "emoxfer/eval/metrics.h"
#include "emoxfer/ser/ser.h"
#include "emoxfer/training/session.h"

namespace emoxfer::cli {

namespace fs = std::filesystem;

namespace {

constexpr char kCorpusMagic[] = "EMOXFER-CORPUS 1";

training::RunConfig ConfigOrToy(const std::string& path) {
  return path.empty() ? training::RunConfig::Toy() : training::LoadRunConfig(path);
}

void EnsureDir(const std::string& dir) {
  if (dir.empty()) throw ParameterError("an output location is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir + ": " + ec.message());
}

void EnsureParent(const std::string& file) {
  const fs::path parent = fs::path(file).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
}

}  // namespace

training::PreparedCorpus LoadData(const std::string& path, int vocab_size) {
  if (path.empty()) throw ParameterError("a manifest or prepared corpus is required");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  std::string first;
  std::getline(is, first);
  if (first == kCorpusMagic) return training::PreparedCorpus::Load(path);
  return training::PrepareManifest(path, vocab_size);
}

toy::ToyCorpusFiles MakeToyCorpus(const MakeToyOptions& o, std::ostream& log) {
  toy::ToyCorpusSpec spec;
  if (!o.spec.empty()) {
    std::ifstream is(o.spec);
    if (!is) throw ConfigError("cannot open toy corpus spec " + o.spec);
    std::stringstream ss;
    ss << is.rdbuf();
    spec = toy::ParseToyCorpusSpec(ss.str());
  }
  if (o.seed) spec.seed = *o.seed;
  EnsureDir(o.out);
  const toy::ToyCorpus corpus = toy::PlanCorpus(spec);
  const toy::ToyCorpusFiles files = toy::WriteToyCorpus(corpus, o.out);
  log << "wrote " << corpus.utterances.size() << " utterances of " << corpus.speakers.size() << " speakers to "
      << o.out << '\n';
  return files;
}

void Preprocess(const PreprocessOptions& o, std::ostream& log) {
  const training::PreparedCorpus corpus = training::PrepareManifest(o.manifest, o.vocab_size);
  EnsureParent(o.out);
  corpus.Save(o.out);
  log << "prepared " << corpus.utterances.size() << " utterances of " << corpus.speakers.size() << " speakers\n";
}

training::SessionResult Train(const TrainOptions& o, std::ostream& log) {
  training::RunConfig cfg = ConfigOrToy(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.steps > 0) cfg.train.max_steps = o.steps;
  cfg.Validate();
  const training::PreparedCorpus corpus = LoadData(o.data, cfg.model.vocab_size);
  training::SessionOptions so;
  so.out_dir = o.out;
  so.resume_from = o.resume;
  so.stop_after = o.stop_after;
  so.progress = &log;
  EnsureDir(o.out);
  const training::SessionResult r = training::RunTraining(cfg, corpus, so);
  log << "checkpoint " << r.checkpoint_path << " (step " << r.last.step << ")\n";
  return r;
}

void TrainSerCommand(const TrainSerOptions& o, std::ostream& log) {
  const training::RunConfig cfg = ConfigOrToy(o.config);
  const training::PreparedCorpus data = LoadData(o.data);
  ser::SerTrainConfig tc;
  tc.steps = o.steps;
  tc.batch_size = o.batch_size;
  tc.learning_rate = o.learning_rate;
  tc.seed = o.seed.value_or(cfg.seed);
  ser::SerTrainResult res;
  const auto model = ser::TrainSer(data.utterances, cfg.model.extractor, tc, &res);
  EnsureParent(o.out);
  model->Save(o.out);
  log << "emotion classifier: " << model->n_classes() << " classes, " << res.train_count << " train / "
      << res.heldout_count << " held out; loss " << res.initial_loss << " -> " << res.final_loss
      << "; held-out accuracy " << res.heldout_accuracy << '\n';
}

void AnalyzeIntensity(const AnalyzeIntensityOptions& o, std::ostream& log) {
  const auto model = ser::SerModel::Load(o.ser_model);
  const training::PreparedCorpus data = LoadData(o.data);
  const ser::IntensityReport rep = ser::IntensitySweep(*model, data.utterances, o.alphas, o.bins);
  EnsureParent(o.out);
  rep.Save(o.out);
  log << "intensity histograms of " << rep.utterances << " utterances at " << rep.alphas.size() << " alphas\n";
}

void LabelReportCommand(const LabelReportOptions& o, std::ostream& log) {
  const auto model = ser::SerModel::Load(o.ser_model);
  const training::PreparedCorpus data = LoadData(o.data);
  const ser::LabelReport rep = ser::MakeLabelReport(*model, data.utterances, o.speakers);
  for (const auto& w : rep.warnings) log << "warning: " << w << '\n';
  EnsureParent(o.out);
  rep.Save(o.out);
  log << "label report for " << rep.rows.size() << " speakers\n";
}

void ExportHiddenCommand(const ExportHiddenOptions& o, std::ostream& log) {
  const auto model = ser::SerModel::Load(o.ser_model);
  const training::PreparedCorpus data = LoadData(o.data);
  EnsureParent(o.out_matrix);
  EnsureParent(o.out_index);
  ser::ExportHidden(*model, data.utterances, o.out_matrix, o.out_index);
  log << "exported " << data.utterances.size() << " hidden features\n";
}

double ResolveIntensity(const std::string& level, std::optional<double> intensity,
                        const training::CheckpointMeta& meta, int emotion) {
  if (intensity) {
    if (!(*intensity >= 0.0 && *intensity <= 1.0)) throw ParameterError("intensity must lie in [0, 1]");
    return *intensity;
  }
  if (level == "low") return 0.1;
  if (level == "high") return 1.0;
  if (level != "moderate") throw ParameterError("unknown intensity level '" + level + "'");
  if (emotion < 0 || emotion >= static_cast<int>(meta.intensity_medians.size()) ||
      !std::isfinite(meta.intensity_medians[static_cast<size_t>(emotion)])) {
    throw MissingStatsError("no stored intensity median for emotion " + std::to_string(emotion));
  }
  return meta.intensity_medians[static_cast<size_t>(emotion)];
}

namespace {

eval::TargetVoice VoiceFor(training::LoadedModel& loaded, const std::string& speaker,
                           const std::string& ref_utterances, int ref_count) {
  const auto& cfg = loaded.checkpoint.config.model;
  if (cfg.timbre.mode == model::TimbreMode::kLookup) {
    return eval::SeenVoice(*loaded.model, loaded.checkpoint.meta, speaker);
  }
  if (ref_utterances.empty()) throw ParameterError("zero-shot synthesis requires --ref-utterances");
  const training::PreparedCorpus refs = LoadData(ref_utterances, cfg.vocab_size);
  return eval::ZeroShotVoice(*loaded.model, speaker, eval::ReferenceUtterances(refs, speaker, ref_count));
}

}  // namespace

model::SynthesisResult Synthesize(const SynthesizeOptions& o, std::ostream& log) {
  training::LoadedModel loaded = training::LoadModel(o.checkpoint);
  for (const auto& w : loaded.checkpoint.warnings) log << "warning: " << w << '\n';
  const auto& cfg = loaded.checkpoint.config.model;
  if (o.phonemes.empty()) throw ParameterError("--text-phonemes is empty");
  for (int p : o.phonemes) {
    if (p < 0 || p >= cfg.vocab_size) throw ParameterError("phoneme id " + std::to_string(p) + " outside vocabulary");
  }
  if (o.emotion < 0 || o.emotion >= cfg.num_labeled_emotions) {
    throw LabelError("emotion " + std::to_string(o.emotion) + " outside the labeled range");
  }
  const double intensity = ResolveIntensity(o.level, o.intensity, loaded.checkpoint.meta, o.emotion);
  const eval::TargetVoice voice = VoiceFor(loaded, o.speaker, o.ref_utterances, o.ref_count);
  model::SynthesisResult syn = loaded.model->Synthesize(o.phonemes, o.emotion, intensity, voice.timbre, voice.stats);

  EnsureDir(o.out);
  const fs::path dir(o.out);
  SaveMatrix((dir / "mel.bin").string(), syn.mel);
  WriteTextFile((dir / "mel.svg").string(),
                HeatmapSvg(syn.mel, {"log-mel, " + o.speaker + ", emotion " + std::to_string(o.emotion), "frame",
                                     "mel band", false}));
  std::ofstream pt(dir / "prosody.tsv");
  pt << "phoneme\tlog_f0\tf0_hz\tenergy_db\tlog_duration\tframes\n" << std::setprecision(9);
  for (size_t i = 0; i < o.phonemes.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    pt << o.phonemes[i] << '\t' << syn.prosody.physical(r, 0) << '\t' << std::exp(syn.prosody.physical(r, 0)) << '\t'
       << syn.prosody.physical(r, 1) << '\t' << syn.prosody.physical(r, 2) << '\t' << syn.prosody.durations[i]
       << '\n';
  }
  if (!pt) throw Error("cannot write prosody trace in " + o.out);
  if (o.preview) {
    dsp::GriffinLimConfig gl;
    gl.iterations = o.preview_iterations;
    gl.seed = o.seed.value_or(0);
    dsp::WriteWav((dir / "preview.wav").string(), dsp::GriffinLimPreview(syn.mel, gl));
  }
  log << "synthesized " << syn.mel.rows() << " frames at intensity " << intensity << " into " << o.out << '\n';
  return syn;
}

eval::TransferReport Transfer(const TransferOptions& o, std::ostream& log) {
  if (o.ib_group != 2 && o.ib_group != 4 && o.ib_group != 8) {
    throw ParameterError("--ib-group must be 2, 4 or 8");
  }
  if (o.zero_shot && o.ref_utterances.empty()) throw ParameterError("--zero-shot requires --ref-utterances");
  if (o.ref_count < 1) throw ParameterError("--ref-count must be positive");
  const toy::ToyCorpus toyc = toy::ReadToyCorpus(o.toy_dir);
  const fs::path toy_dir(o.toy_dir);
  const training::PreparedCorpus all = LoadData((toy_dir / "all.tsv").string(), toyc.spec.vocab_size);
  EnsureDir(o.out);

  std::string checkpoint = o.checkpoint;
  if (checkpoint.empty()) {
    training::RunConfig cfg = ConfigOrToy(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.steps > 0) cfg.train.max_steps = o.steps;
    if (o.zero_shot) {
      cfg.model.timbre.mode = model::TimbreMode::kZeroShot;
      cfg.model.timbre.groups = o.ib_group;
    }
    cfg.Validate();
    training::SessionOptions so;
    so.out_dir = o.out;
    so.progress = &log;
    if (o.zero_shot) {
      const training::PreparedCorpus src = LoadData((toy_dir / "source.tsv").string(), toyc.spec.vocab_size);
      checkpoint = training::RunTraining(cfg, src, so).checkpoint_path;
    } else {
      checkpoint = training::RunTraining(cfg, all, so).checkpoint_path;
    }
  }

  training::LoadedModel loaded = training::LoadModel(checkpoint);
  for (const auto& w : loaded.checkpoint.warnings) log << "warning: " << w << '\n';
  const auto& mcfg = loaded.checkpoint.config.model;
  const bool zs = mcfg.timbre.mode == model::TimbreMode::kZeroShot;
  if (zs != o.zero_shot) throw ParameterError("--zero-shot does not match the checkpoint's timbre mode");
  if (zs && mcfg.timbre.groups != o.ib_group) {
    throw ParameterError("--ib-group " + std::to_string(o.ib_group) + " does not match the checkpoint's " +
                         std::to_string(mcfg.timbre.groups) + " groups");
  }

  std::vector<eval::TargetVoice> voices;
  for (const auto& v : toyc.speakers) {
    if (v.source || (!o.target_speaker.empty() && v.name != o.target_speaker)) continue;
    voices.push_back(VoiceFor(loaded, v.name, o.ref_utterances, o.ref_count));
  }
  if (voices.empty()) throw DataError("no target speaker matches '" + o.target_speaker + "'");

  eval::TransferEvalOptions eo;
  eo.sentences = o.sentences;
  if (o.intensity) eo.intensity = *o.intensity;
  eval::TransferReport rep =
      eval::EvaluateTransfer(*loaded.model, loaded.checkpoint.meta, toyc, voices, eval::SpeakerEnvelopes(all), eo);
  if (o.source_emotion) {
    std::erase_if(rep.pairs, [&](const eval::PairResult& p) { return p.emotion != *o.source_emotion; });
    if (rep.pairs.empty()) throw DataError("the emotion was recorded by every selected target speaker");
    rep.mean_correlation = rep.mean_target_distance = 0.0;
    rep.all_ok = true;
    for (const auto& p : rep.pairs) {
      rep.mean_correlation += p.median_correlation / static_cast<double>(rep.pairs.size());
      rep.mean_target_distance += p.pooled_target_distance / static_cast<double>(rep.pairs.size());
      rep.all_ok = rep.all_ok && p.emotion_ok && p.speaker_ok;
    }
  }

  const std::string header =
      "mode\tib_group\tseed\tstep\ttarget\temotion\tmedian_correlation\tpooled_target_distance\t"
      "pooled_source_distance\temotion_ok\tspeaker_ok";
  auto write_rows = [&](std::ostream& os) {
    os << std::setprecision(9);
    for (const auto& p : rep.pairs) {
      os << (zs ? "zero-shot" : "lookup") << '\t' << (zs ? mcfg.timbre.groups : 0) << '\t'
         << loaded.checkpoint.config.seed << '\t' << loaded.checkpoint.meta.step << '\t' << p.target << '\t'
         << p.emotion << '\t' << p.median_correlation << '\t' << p.pooled_target_distance << '\t'
         << p.pooled_source_distance << '\t' << (p.emotion_ok ? 1 : 0) << '\t' << (p.speaker_ok ? 1 : 0) << '\n';
    }
  };
  {
    std::ofstream os(fs::path(o.out) / "transfer.tsv");
    os << header << '\n';
    write_rows(os);
    if (!os) throw Error("cannot write transfer.tsv in " + o.out);
  }
  if (!o.results.empty()) {
    const bool fresh = !fs::exists(o.results) || fs::file_size(o.results) == 0;
    EnsureParent(o.results);
    std::ofstream os(o.results, std::ios::app);
    if (fresh) os << header << '\n';
    write_rows(os);
    if (!os) throw Error("cannot append to " + o.results);
  }
  for (const auto& p : rep.pairs) {
    log << p.target << " emotion " << p.emotion << ": correlation " << p.median_correlation << ", envelope "
        << p.pooled_target_distance << " to target vs " << p.pooled_source_distance << " to nearest source"
        << (p.emotion_ok && p.speaker_ok ? "" : "  [FAIL]") << '\n';
  }
  log << "mean correlation " << rep.mean_correlation << ", mean target distance " << rep.mean_target_distance
      << '\n';
  return rep;
}

void Preview(const PreviewOptions& o, std::ostream& log) {
  const Mat mel = LoadMatrix(o.mel);
  dsp::GriffinLimConfig gl;
  gl.iterations = o.iterations;
  gl.seed = o.seed.value_or(0);
  const dsp::AudioClip clip = dsp::GriffinLimPreview(mel, gl);
  EnsureParent(o.out);
  dsp::WriteWav(o.out, clip);
  log << "wrote " << clip.DurationSeconds() << " s preview to " << o.out << '\n';
}

namespace {

std::string AlphaTag(double alpha) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << alpha;
  std::string s = os.str();
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::vector<std::string> PlotLosses(const std::string& log_path, const fs::path& out) {
  std::ifstream is(log_path);
  if (!is) throw ParseError("cannot open training log " + log_path);
  const char* names[] = {"l_mel", "l_pros", "l_adv", "l_emo", "total"};
  std::vector<Series> series;
  for (const char* n : names) series.push_back({n, {}, {}});
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double step, v[5];
    if (!(ls >> step >> v[0] >> v[1] >> v[2] >> v[3] >> v[4])) throw ParseError(log_path + ": malformed line");
    for (int k = 0; k < 5; ++k) {
      series[static_cast<size_t>(k)].x.push_back(step);
      series[static_cast<size_t>(k)].y.push_back(v[k]);
    }
  }
  if (series[0].x.empty()) throw ParseError(log_path + ": empty training log");
  const std::string path = (out / "losses.svg").string();
  WriteTextFile(path, LinePlotSvg(series, {"training losses", "step", "loss", true}));
  return {path};
}

std::vector<std::string> PlotHistograms(const std::string& report_path, const fs::path& out) {
  const ser::IntensityReport rep = ser::IntensityReport::Load(report_path);
  std::vector<std::string> bins;
  for (int b = 0; b < rep.bins; ++b) {
    std::ostringstream os;
    os << std::setprecision(2) << static_cast<double>(b) / rep.bins;
    bins.push_back(os.str());
  }
  std::vector<std::string> paths;
  for (size_t a = 0; a < rep.alphas.size(); ++a) {
    std::vector<Series> series;
    for (size_t c = 0; c < rep.class_labels.size(); ++c) {
      Series s{"emotion " + std::to_string(rep.class_labels[c]), {}, {}};
      for (int n : rep.counts[a][c]) s.y.push_back(n);
      series.push_back(std::move(s));
    }
    std::ostringstream title;
    title << "intensity histogram, alpha = " << rep.alphas[a];
    const std::string path = (out / ("histogram_alpha_" + AlphaTag(rep.alphas[a]) + ".svg")).string();
    WriteTextFile(path, BarPlotSvg(bins, series, {title.str(), "intensity (bin start)", "utterances", false}));
    paths.push_back(path);
  }
  return paths;
}

std::vector<std::string> PlotContours(const std::vector<std::string>& mels, const fs::path& out) {
  std::vector<Series> series;
  for (const auto& m : mels) {
    const std::vector<double> f0 = eval::F0Proxy(LoadMatrix(m));
    Series s{fs::path(m).parent_path().filename().string() + "/" + fs::path(m).stem().string(), {}, f0};
    for (size_t t = 0; t < f0.size(); ++t) s.x.push_back(static_cast<double>(t));
    series.push_back(std::move(s));
  }
  const std::string path = (out / "f0_contours.svg").string();
  WriteTextFile(path, LinePlotSvg(series, {"F0 contours", "frame", "F0 proxy (Hz)", false}));
  return {path};
}

}  // namespace

std::vector<std::string> Plot(const PlotOptions& o, std::ostream& log) {
  if (o.inputs.empty()) throw ParameterError("plot needs at least one input file");
  EnsureDir(o.out);
  std::vector<std::string> paths;
  if (o.kind == "losses") {
    paths = PlotLosses(o.inputs.front(), o.out);
  } else if (o.kind == "histograms") {
    paths = PlotHistograms(o.inputs.front(), o.out);
  } else if (o.kind == "f0-contours") {
    paths = PlotContours(o.inputs, o.out);
  } else {
    throw ParameterError("unknown plot kind '" + o.kind + "'");
  }
  for (const auto& p : paths) log << "wrote " << p << '\n';
  return paths;
}

}  // namespace emoxfer::cli
