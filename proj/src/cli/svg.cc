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

#include "emoxfer/cli/svg.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "emoxfer/core/error.h"

namespace emoxfer::cli {
namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Frame {
  double x0, x1, y0, y1;
  double PlotW() const { return kWidth - kLeft - kRight; }
  double PlotH() const { return kHeight - kTop - kBottom; }
  double X(double x) const { return kLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * PlotW(); }
  double Y(double y) const { return kTop + PlotH() - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * PlotH(); }
};

void Open(std::ostringstream& os, const Axes& axes) {
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << Escape(axes.title)
     << "</text>\n";
}

void Decorate(std::ostringstream& os, const Frame& f, const Axes& axes, bool log_y, bool x_ticks) {
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << f.PlotW() << "\" height=\"" << f.PlotH()
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = f.y0 + (f.y1 - f.y0) * i / 4.0;
    os << "<text x=\"" << kLeft - 6 << "\" y=\"" << f.Y(v) + 4 << "\" text-anchor=\"end\">"
       << Num(log_y ? std::pow(10.0, v) : v) << "</text>\n";
    if (x_ticks) {
      const double u = f.x0 + (f.x1 - f.x0) * i / 4.0;
      os << "<text x=\"" << f.X(u) << "\" y=\"" << kTop + f.PlotH() + 16 << "\" text-anchor=\"middle\">" << Num(u)
         << "</text>\n";
    }
  }
  os << "<text x=\"" << kLeft + f.PlotW() / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">"
     << Escape(axes.xlabel) << "</text>\n"
     << "<text x=\"16\" y=\"" << kTop + f.PlotH() / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << kTop + f.PlotH() / 2 << ")\">" << Escape(axes.ylabel) << "</text>\n";
}

void Legend(std::ostringstream& os, const std::vector<Series>& series) {
  for (size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    os << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
       << kPalette[i % 10] << "\"/>\n"
       << "<text x=\"" << kWidth - kRight + 30 << "\" y=\"" << y + 1 << "\">" << Escape(series[i].name)
       << "</text>\n";
  }
}

}  // namespace

std::string LinePlotSvg(const std::vector<Series>& series, const Axes& axes) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  auto ty = [&](double y) { return axes.log_y ? std::log10(y) : y; };
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw ShapeError("series x and y lengths differ");
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (axes.log_y && s.y[i] <= 0.0)) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  const Frame f{x0, x1, y0, y1};
  std::ostringstream os;
  Open(os, axes);
  Decorate(os, f, axes, axes.log_y, true);
  for (size_t k = 0; k < series.size(); ++k) {
    os << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << kPalette[k % 10] << "\" points=\"";
    const auto& s = series[k];
    for (size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (axes.log_y && s.y[i] <= 0.0)) continue;
      os << Num(f.X(s.x[i])) << ',' << Num(f.Y(ty(s.y[i]))) << ' ';
    }
    os << "\"/>\n";
  }
  Legend(os, series);
  os << "</svg>\n";
  return os.str();
}

std::string BarPlotSvg(const std::vector<std::string>& categories, const std::vector<Series>& series,
                       const Axes& axes) {
  double y1 = 0.0;
  for (const auto& s : series) {
    if (s.y.size() != categories.size()) throw ShapeError("bar series must have one value per category");
    for (double v : s.y) y1 = std::max(y1, v);
  }
  if (y1 <= 0.0) y1 = 1.0;
  const Frame f{0.0, static_cast<double>(categories.size()), 0.0, y1};
  std::ostringstream os;
  Open(os, axes);
  Decorate(os, f, axes, false, false);
  const double group = f.PlotW() / std::max<size_t>(1, categories.size());
  const double bar = group * 0.8 / std::max<size_t>(1, series.size());
  for (size_t c = 0; c < categories.size(); ++c) {
    for (size_t k = 0; k < series.size(); ++k) {
      const double v = series[k].y[c];
      const double x = kLeft + group * static_cast<double>(c) + group * 0.1 + bar * static_cast<double>(k);
      os << "<rect x=\"" << Num(x) << "\" y=\"" << Num(f.Y(v)) << "\" width=\"" << Num(bar) << "\" height=\""
         << Num(f.Y(0.0) - f.Y(v)) << "\" fill=\"" << kPalette[k % 10] << "\"/>\n";
    }
    if (categories.size() <= 25) {
      os << "<text x=\"" << Num(kLeft + group * (static_cast<double>(c) + 0.5)) << "\" y=\""
         << kTop + f.PlotH() + 16 << "\" text-anchor=\"middle\" font-size=\"9\">" << Escape(categories[c])
         << "</text>\n";
    }
  }
  Legend(os, series);
  os << "</svg>\n";
  return os.str();
}

std::string HeatmapSvg(const Mat& values, const Axes& axes) {
  const double lo = values.size() > 0 ? values.minCoeff() : 0.0;
  const double hi = values.size() > 0 ? values.maxCoeff() : 1.0;
  const Frame f{0.0, static_cast<double>(std::max<Eigen::Index>(1, values.rows())), 0.0,
                static_cast<double>(std::max<Eigen::Index>(1, values.cols()))};
  std::ostringstream os;
  Open(os, axes);
  const double w = f.PlotW() / f.x1, h = f.PlotH() / f.y1;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double t = hi > lo ? (values(r, c) - lo) / (hi - lo) : 0.0;
      const int g = static_cast<int>(std::lround(255.0 * (1.0 - t)));
      os << "<rect x=\"" << Num(f.X(static_cast<double>(r))) << "\" y=\"" << Num(f.Y(static_cast<double>(c + 1)))
         << "\" width=\"" << Num(w + 0.3) << "\" height=\"" << Num(h + 0.3) << "\" fill=\"rgb(" << g << ',' << g
         << ',' << 255 << ")\"/>\n";
    }
  }
  Decorate(os, f, axes, false, true);
  os << "</svg>\n";
  return os.str();
}

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << content;
  if (!os) throw Error("write failed: " + path);
}

}  // namespace emoxfer::cli
