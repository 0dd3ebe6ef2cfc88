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

#ifndef EMOXFER_CORE_ARCHIVE_H_
#define EMOXFER_CORE_ARCHIVE_H_

#include <string>
#include <utility>
#include <vector>

#include "emoxfer/core/tensor.h"

namespace emoxfer {

// Sectioned container: a text header followed by a little-endian float32
// blob. The header is
//   <magic>
//   field <key> <value to end of line>
//   tensor <section> <name> <byte offset> <rows> <cols>
//   end_header
// with offsets relative to the first byte after end_header.
class TensorArchive {
 public:
  explicit TensorArchive(std::string magic) : magic_(std::move(magic)) {}

  void SetField(const std::string& key, const std::string& value);
  bool HasField(const std::string& key) const;
  // Throws ParseError when absent.
  const std::string& Field(const std::string& key) const;

  void Put(const std::string& section, const std::string& name, const Mat& value);
  bool Has(const std::string& section, const std::string& name) const;
  bool HasSection(const std::string& section) const;
  void RemoveSection(const std::string& section);
  // Throws ParseError when absent.
  const Mat& Get(const std::string& section, const std::string& name) const;

  void Save(const std::string& path) const;
  // Throws ParseError on a wrong magic line or malformed header.
  static TensorArchive Load(const std::string& path, const std::string& magic);

  const std::string& magic() const { return magic_; }

 private:
  struct Entry {
    std::string section;
    std::string name;
    Mat value;
  };
  const Entry* Find(const std::string& section, const std::string& name) const;

  std::string magic_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<Entry> tensors_;
};

}  // namespace emoxfer

#endif  // EMOXFER_CORE_ARCHIVE_H_
