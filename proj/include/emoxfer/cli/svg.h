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

#ifndef EMOXFER_CLI_SVG_H_
#define EMOXFER_CLI_SVG_H_

#include <string>
#include <vector>

#include "emoxfer/core/tensor.h"

// Minimal deterministic SVG charts for the plot command.
namespace emoxfer::cli {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Axes {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = false;  // non-positive values are dropped
};

std::string LinePlotSvg(const std::vector<Series>& series, const Axes& axes);

// Grouped bars: one group per category, one bar per series (y per category).
std::string BarPlotSvg(const std::vector<std::string>& categories, const std::vector<Series>& series,
                       const Axes& axes);

// Rows of |values| along x, columns along y (bottom to top).
std::string HeatmapSvg(const Mat& values, const Axes& axes);

void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace emoxfer::cli

#endif  // EMOXFER_CLI_SVG_H_
