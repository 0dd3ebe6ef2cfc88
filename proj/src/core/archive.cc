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

#include "emoxfer/core/archive.h"

#include <fstream>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer {
namespace {

bool ValidToken(const std::string& s) {
  return !s.empty() && s.find_first_of(" \t\n\r") == std::string::npos;
}

}  // namespace

void TensorArchive::SetField(const std::string& key, const std::string& value) {
  if (!ValidToken(key) || value.find('\n') != std::string::npos) throw ParameterError("bad archive field " + key);
  for (auto& [k, v] : fields_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  fields_.emplace_back(key, value);
}

bool TensorArchive::HasField(const std::string& key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& TensorArchive::Field(const std::string& key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  throw ParseError("archive has no field '" + key + "'");
}

const TensorArchive::Entry* TensorArchive::Find(const std::string& section, const std::string& name) const {
  for (const auto& e : tensors_) {
    if (e.section == section && e.name == name) return &e;
  }
  return nullptr;
}

void TensorArchive::Put(const std::string& section, const std::string& name, const Mat& value) {
  if (!ValidToken(section) || !ValidToken(name)) throw ParameterError("bad tensor name " + section + "/" + name);
  for (auto& e : tensors_) {
    if (e.section == section && e.name == name) {
      e.value = value;
      return;
    }
  }
  tensors_.push_back({section, name, value});
}

bool TensorArchive::Has(const std::string& section, const std::string& name) const {
  return Find(section, name) != nullptr;
}

bool TensorArchive::HasSection(const std::string& section) const {
  for (const auto& e : tensors_) {
    if (e.section == section) return true;
  }
  return false;
}

void TensorArchive::RemoveSection(const std::string& section) {
  std::erase_if(tensors_, [&](const Entry& e) { return e.section == section; });
}

const Mat& TensorArchive::Get(const std::string& section, const std::string& name) const {
  const Entry* e = Find(section, name);
  if (e == nullptr) throw ParseError("archive has no tensor " + section + "/" + name);
  return e->value;
}

void TensorArchive::Save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << magic_ << '\n';
  for (const auto& [k, v] : fields_) os << "field " << k << ' ' << v << '\n';
  size_t offset = 0;
  for (const auto& e : tensors_) {
    os << "tensor " << e.section << ' ' << e.name << ' ' << offset << ' ' << e.value.rows() << ' '
       << e.value.cols() << '\n';
    offset += static_cast<size_t>(e.value.size()) * 4;
  }
  os << "end_header\n";
  for (const auto& e : tensors_) WriteFloat32LE(os, e.value);
  if (!os) throw Error("write failed: " + path);
}

TensorArchive TensorArchive::Load(const std::string& path, const std::string& magic) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != magic) throw ParseError(path + ": not a " + magic + " file");
  TensorArchive ar(magic);
  struct Pending {
    std::string section, name;
    size_t offset;
    long rows, cols;
  };
  std::vector<Pending> pending;
  bool ended = false;
  while (std::getline(is, line)) {
    if (line == "end_header") {
      ended = true;
      break;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "field") {
      std::string key;
      ls >> key;
      std::string value;
      std::getline(ls, value);
      if (!value.empty() && value[0] == ' ') value.erase(0, 1);
      ar.fields_.emplace_back(key, value);
    } else if (kind == "tensor") {
      Pending p;
      if (!(ls >> p.section >> p.name >> p.offset >> p.rows >> p.cols) || p.rows < 0 || p.cols < 0) {
        throw ParseError(path + ": malformed tensor line '" + line + "'");
      }
      pending.push_back(p);
    } else {
      throw ParseError(path + ": unexpected header line '" + line + "'");
    }
  }
  if (!ended) throw ParseError(path + ": missing end_header");
  const std::streampos base = is.tellg();
  for (const auto& p : pending) {
    is.seekg(base + static_cast<std::streamoff>(p.offset));
    Mat m(p.rows, p.cols);
    ReadFloat32LE(is, &m);
    ar.tensors_.push_back({p.section, p.name, std::move(m)});
  }
  return ar;
}

}  // namespace emoxfer
