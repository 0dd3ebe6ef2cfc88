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

#include "emoxfer/dsp/corpus_io.h"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer::dsp {
namespace {

std::string Where(const std::string& path, int lineno) {
  return path + ":" + std::to_string(lineno) + ": ";
}

int ParseInt(const std::string& token, const std::string& where) {
  int value = 0;
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParseError(where + "not an integer: '" + token + "'");
  return value;
}

int ParsePhoneme(const std::string& token, int vocab_size, const std::string& where) {
  const int id = ParseInt(token, where);
  if (id < 0 || (vocab_size > 0 && id >= vocab_size)) {
    throw ParseError(where + "unknown phoneme symbol " + token);
  }
  return id;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::vector<UtteranceRecord> LoadManifest(const std::string& path, int vocab_size) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open manifest " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::vector<UtteranceRecord> records;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = Where(path, lineno);
    const auto fields = SplitTabs(line);
    if (fields.size() != 4) throw ParseError(where + "expected 4 tab-separated fields");
    if (fields[0].empty() || fields[1].empty()) throw ParseError(where + "empty path or speaker");

    UtteranceRecord rec;
    std::filesystem::path audio(fields[0]);
    rec.audio_path = audio.is_absolute() ? audio.string() : (base / audio).string();
    rec.speaker_id = fields[1];
    std::istringstream ps(fields[2]);
    std::string tok;
    while (ps >> tok) rec.phoneme_ids.push_back(ParsePhoneme(tok, vocab_size, where));
    if (rec.phoneme_ids.empty()) throw ParseError(where + "empty phoneme sequence");
    if (fields[3] != "-") {
      const int label = ParseInt(fields[3], where);
      if (label < 0) throw ParseError(where + "negative emotion label");
      rec.emotion_label = label;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void WriteManifest(const std::string& path, const std::vector<UtteranceRecord>& records) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  for (const auto& r : records) {
    os << r.audio_path << '\t' << r.speaker_id << '\t';
    for (size_t i = 0; i < r.phoneme_ids.size(); ++i) {
      os << (i ? " " : "") << r.phoneme_ids[i];
    }
    os << '\t';
    if (r.emotion_label) {
      os << *r.emotion_label;
    } else {
      os << '-';
    }
    os << '\n';
  }
}

std::string AlignmentPathFor(const std::string& audio_path) {
  std::filesystem::path p(audio_path);
  p.replace_extension(".ali");
  return p.string();
}

PhonemeAlignment LoadAlignment(const std::string& path, int vocab_size) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open alignment " + path);
  PhonemeAlignment ali;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = Where(path, lineno);
    std::istringstream ls(line);
    std::string id_tok, dur_tok, extra;
    if (!(ls >> id_tok >> dur_tok) || (ls >> extra)) {
      throw ParseError(where + "expected 'phoneme_id duration_frames'");
    }
    const int id = ParsePhoneme(id_tok, vocab_size, where);
    const int dur = ParseInt(dur_tok, where);
    if (dur < 0) throw ParseError(where + "negative duration");
    if (dur == 0) throw ParseError(where + "zero duration");
    ali.phoneme_ids.push_back(id);
    ali.durations.push_back(dur);
  }
  if (ali.phoneme_ids.empty()) throw ParseError("empty alignment " + path);
  return ali;
}

void WriteAlignment(const std::string& path, const PhonemeAlignment& alignment) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  for (size_t i = 0; i < alignment.size(); ++i) {
    os << alignment.phoneme_ids[i] << ' ' << alignment.durations[i] << '\n';
  }
}

PhonemeAlignment ReconcileAlignment(PhonemeAlignment alignment, int num_frames, int max_residue) {
  if (alignment.durations.empty()) throw AlignmentError("empty alignment");
  const int delta = num_frames - alignment.TotalFrames();
  if (std::abs(delta) > max_residue) {
    throw AlignmentError("alignment covers " + std::to_string(alignment.TotalFrames()) +
                         " frames but the mel has " + std::to_string(num_frames));
  }
  alignment.durations.back() += delta;
  if (alignment.durations.back() < 1) {
    throw AlignmentError("reconciliation leaves the final phoneme without frames");
  }
  return alignment;
}

}  // namespace emoxfer::dsp
