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

#ifndef EMOXFER_CORE_TENSOR_H_
#define EMOXFER_CORE_TENSOR_H_

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace emoxfer {

// All arithmetic is carried out in double precision; row-major so that a
// [positions x channels] feature map can be reinterpreted without copies.
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

// Persistent state (parameters, optimizer moments, statistics) is stored as
// little-endian float32. Values that must survive a save/load cycle bit for
// bit are kept float32-representable with these helpers.
inline double RoundToFloat(double x) { return static_cast<double>(static_cast<float>(x)); }
void RoundToFloat(Mat* m);

bool AllFinite(const Mat& m);

// Little-endian float32 helpers for the binary containers.
void WriteFloat32LE(std::ostream& os, const Mat& m);
void ReadFloat32LE(std::istream& is, Mat* m);  // m must be pre-sized

// Single-matrix file: one text header line "EMOXFER-MAT <rows> <cols>\n"
// followed by rows*cols little-endian float32 values in row-major order.
void SaveMatrix(const std::string& path, const Mat& m);
Mat LoadMatrix(const std::string& path);

// Feature-file pair used by hidden-feature export: a float32 matrix with a
// header line plus a text index, one line per row.
void SaveFeatureTable(const std::string& matrix_path, const std::string& index_path,
                      const Mat& rows, const std::vector<std::string>& index_lines);

}  // namespace emoxfer

#endif  // EMOXFER_CORE_TENSOR_H_
