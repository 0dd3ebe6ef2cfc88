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

#include "emoxfer/core/tensor.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer {

void RoundToFloat(Mat* m) {
  for (Eigen::Index i = 0; i < m->size(); ++i) {
    m->data()[i] = RoundToFloat(m->data()[i]);
  }
}

bool AllFinite(const Mat& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) return false;
  }
  return true;
}

namespace {

std::uint32_t ToLE(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
}

}  // namespace

void WriteFloat32LE(std::ostream& os, const Mat& m) {
  std::vector<std::uint32_t> buf(static_cast<size_t>(m.size()));
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const float f = static_cast<float>(m.data()[i]);
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof(u));
    buf[static_cast<size_t>(i)] = ToLE(u);
  }
  os.write(reinterpret_cast<const char*>(buf.data()),
           static_cast<std::streamsize>(buf.size() * sizeof(std::uint32_t)));
}

void ReadFloat32LE(std::istream& is, Mat* m) {
  std::vector<std::uint32_t> buf(static_cast<size_t>(m->size()));
  is.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(std::uint32_t)));
  if (!is) throw ParseError("truncated float32 payload");
  for (Eigen::Index i = 0; i < m->size(); ++i) {
    const std::uint32_t u = ToLE(buf[static_cast<size_t>(i)]);
    float f;
    std::memcpy(&f, &u, sizeof(f));
    m->data()[i] = static_cast<double>(f);
  }
}

void SaveMatrix(const std::string& path, const Mat& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << "EMOXFER-MAT " << m.rows() << ' ' << m.cols() << '\n';
  WriteFloat32LE(os, m);
  if (!os) throw Error("write failed: " + path);
}

Mat LoadMatrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic;
  long rows = -1, cols = -1;
  hs >> magic >> rows >> cols;
  if (magic != "EMOXFER-MAT" || rows < 0 || cols < 0) {
    throw ParseError("bad matrix header in " + path);
  }
  Mat m(rows, cols);
  ReadFloat32LE(is, &m);
  return m;
}

void SaveFeatureTable(const std::string& matrix_path, const std::string& index_path,
                      const Mat& rows, const std::vector<std::string>& index_lines) {
  if (static_cast<Eigen::Index>(index_lines.size()) != rows.rows()) {
    throw ShapeError("feature index length does not match row count");
  }
  SaveMatrix(matrix_path, rows);
  std::ofstream os(index_path);
  if (!os) throw Error("cannot open " + index_path + " for writing");
  for (const auto& line : index_lines) os << line << '\n';
}

}  // namespace emoxfer
