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

#include "emoxfer/ser/ser.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "emoxfer/core/archive.h"
#include "emoxfer/core/error.h"
#include "emoxfer/core/rng.h"
#include "emoxfer/model/emotion_encoder.h"
#include "emoxfer/training/optimizer.h"

namespace emoxfer::ser {

namespace {

constexpr char kMagic[] = "EMOXFER-SER 1";
constexpr int kMelBands = 80;

template <typename T>
std::string JoinInts(const T& values) {
  std::ostringstream os;
  bool first = true;
  for (int v : values) {
    os << (first ? "" : " ") << v;
    first = false;
  }
  return os.str();
}

std::vector<int> SplitInts(const std::string& text) {
  std::istringstream is(text);
  std::vector<int> out;
  int v;
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw ParseError("malformed integer list: " + text);
  return out;
}

}  // namespace

SerModel::SerModel(const model::ExtractorConfig& cfg, std::vector<int> class_labels, uint64_t seed)
    : cfg_(cfg), labels_(std::move(class_labels)) {
  if (labels_.size() < 2) throw DataError("an emotion classifier needs at least two classes");
  if (std::set<int>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw DataError("duplicate class labels");
  }
  Rng rng(seed);
  extractor_ = model::EmotionExtractor(cfg_, kMelBands, rng);
  head_ = nn::Linear(extractor_.hidden_dim(), n_classes(), rng);
  // A zero head starts from the uniform posterior (loss ln n).
  head_.weight().value.setZero();
  head_.bias().value.setZero();
  extractor_.Collect("extractor", &params_);
  head_.Collect("head", &params_);
  mel_mean_ = Mat::Zero(1, kMelBands);
  mel_std_ = Mat::Ones(1, kMelBands);
}

int SerModel::ClassOf(int label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

void SerModel::SetMelStats(const Mat& mean, const Mat& stddev) {
  if (mean.rows() != 1 || mean.cols() != kMelBands || stddev.rows() != 1 || stddev.cols() != kMelBands) {
    throw ShapeError("mel statistics must be [1 x 80]");
  }
  mel_mean_ = mean;
  mel_std_ = stddev;
}

Mat SerModel::Normalize(const Mat& log_mel) const {
  if (log_mel.cols() != kMelBands) throw ShapeError("expected an 80-band log-mel");
  return training::NormalizeMelWith(log_mel, mel_mean_, mel_std_);
}

ad::Var SerModel::Logits(ad::Tape& tape, ad::Var mel) const {
  return head_.Forward(tape, extractor_.Forward(tape, mel));
}

Vec SerModel::Logits(const Mat& log_mel) const {
  ad::Tape tape(false);
  const ad::Var z = Logits(tape, tape.Constant(Normalize(log_mel)));
  return z.value().row(0).transpose();
}

Vec SerModel::Posterior(const Mat& log_mel) const { return model::SoftmaxPosterior(Logits(log_mel)); }

Vec SerModel::Hidden(const Mat& log_mel) const {
  ad::Tape tape(false);
  const ad::Var h = extractor_.Forward(tape, tape.Constant(Normalize(log_mel)));
  return h.value().row(0).transpose();
}

void SerModel::Save(const std::string& path) const {
  TensorArchive ar(kMagic);
  ar.SetField("labels", JoinInts(labels_));
  ar.SetField("channels", JoinInts(cfg_.channels));
  ar.SetField("time_strided_stages", std::to_string(cfg_.time_strided_stages));
  ar.SetField("gru_hidden", std::to_string(cfg_.gru_hidden));
  ar.SetField("hidden_dim", std::to_string(cfg_.hidden_dim));
  for (const auto& [name, p] : params_.entries()) ar.Put("params", name, p->value);
  ar.Put("stats", "mel_mean", mel_mean_);
  ar.Put("stats", "mel_std", mel_std_);
  ar.Save(path);
}

std::unique_ptr<SerModel> SerModel::Load(const std::string& path) {
  const TensorArchive ar = TensorArchive::Load(path, kMagic);
  model::ExtractorConfig cfg;
  const std::vector<int> channels = SplitInts(ar.Field("channels"));
  if (channels.size() != cfg.channels.size()) throw ParseError(path + ": expected five channel counts");
  std::copy(channels.begin(), channels.end(), cfg.channels.begin());
  try {
    cfg.time_strided_stages = std::stoi(ar.Field("time_strided_stages"));
    cfg.gru_hidden = std::stoi(ar.Field("gru_hidden"));
    cfg.hidden_dim = std::stoi(ar.Field("hidden_dim"));
  } catch (const std::logic_error&) {
    throw ParseError(path + ": malformed extractor fields");
  }
  auto m = std::make_unique<SerModel>(cfg, SplitInts(ar.Field("labels")), 0);
  for (const auto& [name, p] : m->params_.entries()) {
    const Mat& v = ar.Get("params", name);
    if (v.rows() != p->value.rows() || v.cols() != p->value.cols()) {
      throw ParseError(path + ": shape mismatch for " + name);
    }
    p->value = v;
  }
  m->SetMelStats(ar.Get("stats", "mel_mean"), ar.Get("stats", "mel_std"));
  return m;
}

std::unique_ptr<SerModel> TrainSer(const std::vector<training::PreparedUtterance>& data,
                                   const model::ExtractorConfig& cfg, const SerTrainConfig& tc,
                                   SerTrainResult* result) {
  if (tc.steps < 0 || tc.batch_size < 1 || !(tc.learning_rate >= 0.0) || !(tc.holdout_fraction >= 0.0) ||
      !(tc.holdout_fraction < 1.0)) {
    throw ConfigError("invalid emotion-classifier training settings");
  }
  std::map<int, std::vector<int>> by_label;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].label) by_label[*data[i].label].push_back(static_cast<int>(i));
  }
  if (by_label.size() < 2) throw DataError("emotion-classifier training needs labeled utterances of two classes");
  std::vector<int> labels;
  for (const auto& [label, _] : by_label) labels.push_back(label);

  // Per-class seeded shuffle; the first round(f * n) of each class are held
  // out, keeping at least one training utterance per class.
  Rng split_rng(MixSeed(tc.seed, 0x5e7));
  std::vector<int> train, heldout;
  for (auto& [label, idx] : by_label) {
    for (size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[static_cast<size_t>(split_rng.UniformInt(static_cast<int>(i)))]);
    }
    const auto n = static_cast<int>(idx.size());
    const int held = std::min(n - 1, static_cast<int>(std::lround(tc.holdout_fraction * n)));
    heldout.insert(heldout.end(), idx.begin(), idx.begin() + held);
    train.insert(train.end(), idx.begin() + held, idx.end());
  }

  auto m = std::make_unique<SerModel>(cfg, labels, MixSeed(tc.seed, 0x1417));

  // Band statistics over the training frames.
  Mat sum = Mat::Zero(1, kMelBands), sq = Mat::Zero(1, kMelBands);
  double frames = 0.0;
  for (int i : train) {
    const Mat& mel = data[static_cast<size_t>(i)].log_mel;
    if (mel.cols() != kMelBands) throw ShapeError("expected an 80-band log-mel");
    sum += mel.colwise().sum();
    sq += mel.array().square().colwise().sum().matrix();
    frames += static_cast<double>(mel.rows());
  }
  Mat mean = sum / frames;
  Mat stddev = ((sq / frames).array() - mean.array().square()).max(0.0).sqrt().max(1e-3).matrix();
  RoundToFloat(&mean);
  RoundToFloat(&stddev);
  m->SetMelStats(mean, stddev);

  std::vector<Mat> train_mels;
  std::vector<int> train_classes;
  for (int i : train) {
    train_mels.push_back(m->Normalize(data[static_cast<size_t>(i)].log_mel));
    train_classes.push_back(m->ClassOf(*data[static_cast<size_t>(i)].label));
  }

  auto mean_loss = [&](const std::vector<int>& rows) {
    double total = 0.0;
    for (int r : rows) {
      ad::Tape tape(false);
      total += ad::CrossEntropy(m->Logits(tape, tape.Constant(train_mels[static_cast<size_t>(r)])),
                                train_classes[static_cast<size_t>(r)])
                   .scalar();
    }
    return total / static_cast<double>(rows.size());
  };
  std::vector<int> all_train(train.size());
  std::iota(all_train.begin(), all_train.end(), 0);

  SerTrainResult res;
  res.train_count = static_cast<int>(train.size());
  res.heldout_count = static_cast<int>(heldout.size());
  res.initial_loss = mean_loss(all_train);

  training::Adam adam(m->params(), {});
  for (int step = 1; step <= tc.steps; ++step) {
    Rng rng(MixSeed(tc.seed, static_cast<uint64_t>(step)));
    m->params().ZeroGrad();
    const double inv_b = 1.0 / tc.batch_size;
    for (int b = 0; b < tc.batch_size; ++b) {
      const auto r = static_cast<size_t>(rng.UniformInt(static_cast<int>(train.size())));
      ad::Tape tape;
      const ad::Var loss = ad::CrossEntropy(m->Logits(tape, tape.Constant(train_mels[r])), train_classes[r]);
      tape.Backward(ad::Scale(loss, inv_b));
    }
    const double norm = training::ClipGradients(m->params(), 1.0);
    if (!std::isfinite(norm)) throw DivergenceError("non-finite gradient in emotion-classifier training");
    adam.Step(tc.learning_rate);
  }
  res.final_loss = mean_loss(all_train);

  int correct = 0;
  for (int i : heldout) {
    const Vec p = m->Posterior(data[static_cast<size_t>(i)].log_mel);
    Eigen::Index arg;
    p.maxCoeff(&arg);
    correct += labels[static_cast<size_t>(arg)] == *data[static_cast<size_t>(i)].label ? 1 : 0;
  }
  res.heldout_accuracy = heldout.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(heldout.size());
  if (result != nullptr) *result = res;
  return m;
}

int IntensityReport::Mass(size_t alpha_index) const {
  int total = 0;
  for (const auto& per_class : counts.at(alpha_index)) {
    for (int c : per_class) total += c;
  }
  return total;
}

void IntensityReport::Save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "alpha\tlabel\tbin_lo\tbin_hi\tcount\n";
  for (size_t a = 0; a < alphas.size(); ++a) {
    for (size_t c = 0; c < class_labels.size(); ++c) {
      for (int b = 0; b < bins; ++b) {
        os << alphas[a] << '\t' << class_labels[c] << '\t' << static_cast<double>(b) / bins << '\t'
           << static_cast<double>(b + 1) / bins << '\t' << counts[a][c][static_cast<size_t>(b)] << '\n';
      }
    }
  }
  if (!os) throw Error("write failed: " + path);
}

IntensityReport IntensityReport::Load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open " + path);
  std::string line;
  std::getline(is, line);
  if (line != "alpha\tlabel\tbin_lo\tbin_hi\tcount") throw ParseError(path + ": not an intensity report");
  struct Row {
    double alpha, lo;
    int label, count;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    Row r;
    double hi;
    if (!(ls >> r.alpha >> r.label >> r.lo >> hi >> r.count)) throw ParseError(path + ": malformed row: " + line);
    rows.push_back(r);
  }
  IntensityReport rep;
  std::map<int, int> bins_seen;
  for (const Row& r : rows) {
    if (std::find(rep.alphas.begin(), rep.alphas.end(), r.alpha) == rep.alphas.end()) rep.alphas.push_back(r.alpha);
    if (std::find(rep.class_labels.begin(), rep.class_labels.end(), r.label) == rep.class_labels.end()) {
      rep.class_labels.push_back(r.label);
    }
  }
  if (rep.alphas.empty() || rep.class_labels.empty()) throw ParseError(path + ": empty intensity report");
  const size_t per = rows.size() / (rep.alphas.size() * rep.class_labels.size());
  if (per == 0 || per * rep.alphas.size() * rep.class_labels.size() != rows.size()) {
    throw ParseError(path + ": incomplete intensity report");
  }
  rep.bins = static_cast<int>(per);
  rep.counts.assign(rep.alphas.size(),
                    std::vector<std::vector<int>>(rep.class_labels.size(), std::vector<int>(per, 0)));
  for (const Row& r : rows) {
    const auto a = static_cast<size_t>(std::find(rep.alphas.begin(), rep.alphas.end(), r.alpha) - rep.alphas.begin());
    const auto c = static_cast<size_t>(std::find(rep.class_labels.begin(), rep.class_labels.end(), r.label) -
                                       rep.class_labels.begin());
    const auto b = std::min(per - 1, static_cast<size_t>(std::lround(r.lo * rep.bins)));
    rep.counts[a][c][b] += r.count;
  }
  rep.utterances = rep.Mass(0);
  return rep;
}

IntensityReport IntensitySweep(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                               const std::vector<double>& alphas, int bins) {
  if (bins < 1) throw ParameterError("bins must be positive");
  if (alphas.empty()) throw ParameterError("empty alpha list");
  for (double a : alphas) {
    if (!(a > 1.0)) throw ParameterError("alpha must exceed 1");
  }
  IntensityReport rep;
  rep.alphas = alphas;
  rep.class_labels = model.class_labels();
  rep.bins = bins;
  rep.counts.assign(alphas.size(), std::vector<std::vector<int>>(static_cast<size_t>(model.n_classes()),
                                                                std::vector<int>(static_cast<size_t>(bins), 0)));
  for (const auto& u : utterances) {
    const Vec z = model.Logits(u.log_mel);
    Eigen::Index arg;
    z.maxCoeff(&arg);
    for (size_t a = 0; a < alphas.size(); ++a) {
      const double v = model::ModifiedSoftmax(z, alphas[a])(arg);
      const int b = std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1);
      ++rep.counts[a][static_cast<size_t>(arg)][static_cast<size_t>(b)];
    }
  }
  rep.utterances = static_cast<int>(utterances.size());
  return rep;
}

void LabelReport::Save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "speaker\tutterances";
  for (int l : class_labels) os << "\tlabel_" << l;
  os << '\n' << std::fixed << std::setprecision(2);
  for (const auto& r : rows) {
    os << r.speaker << '\t' << r.utterances;
    for (double p : r.percent) os << '\t' << p;
    os << '\n';
  }
  if (!os) throw Error("write failed: " + path);
}

LabelReport MakeLabelReport(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                            const std::vector<std::string>& speakers) {
  std::map<std::string, std::vector<int>> counts;
  const auto n = static_cast<size_t>(model.n_classes());
  for (const auto& u : utterances) {
    const Vec p = model.Posterior(u.log_mel);
    Eigen::Index arg;
    p.maxCoeff(&arg);
    auto& c = counts[u.speaker];
    c.resize(n, 0);
    ++c[static_cast<size_t>(arg)];
  }
  std::vector<std::string> order = speakers;
  if (order.empty()) {
    for (const auto& [s, _] : counts) order.push_back(s);
  }
  LabelReport rep;
  rep.class_labels = model.class_labels();
  for (const auto& s : order) {
    const auto it = counts.find(s);
    if (it == counts.end()) {
      rep.warnings.push_back("speaker " + s + " has no utterances; omitted");
      continue;
    }
    SpeakerLabelRow row;
    row.speaker = s;
    row.utterances = std::accumulate(it->second.begin(), it->second.end(), 0);
    for (int c : it->second) row.percent.push_back(100.0 * c / row.utterances);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

void ExportHidden(const SerModel& model, const std::vector<training::PreparedUtterance>& utterances,
                  const std::string& matrix_path, const std::string& index_path) {
  Mat rows(static_cast<Eigen::Index>(utterances.size()), model.config().hidden_dim);
  std::vector<std::string> index;
  for (size_t i = 0; i < utterances.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = model.Hidden(utterances[i].log_mel).transpose();
    const auto& u = utterances[i];
    index.push_back(u.id + '\t' + u.speaker + '\t' + (u.label ? std::to_string(*u.label) : std::string("-")));
  }
  SaveFeatureTable(matrix_path, index_path, rows, index);
}

}  // namespace emoxfer::ser
