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

#include "emoxfer/dsp/audio.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "emoxfer/core/error.h"

namespace emoxfer::dsp {

void ValidateClip(const AudioClip& clip) {
  if (clip.sample_rate <= 0) throw DataError("sample rate must be positive");
  for (double s : clip.samples) {
    if (!std::isfinite(s)) throw DataError("audio contains non-finite samples");
  }
}

AudioClip Resample(const AudioClip& clip, int target_rate) {
  ValidateClip(clip);
  if (target_rate <= 0) throw ParameterError("target rate must be positive");
  if (clip.sample_rate == target_rate) return clip;
  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to the input Nyquist
  constexpr int kHalfTaps = 16;
  const double support = kHalfTaps / cutoff;
  const auto n_out = static_cast<size_t>(std::floor(clip.samples.size() * ratio));
  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  const auto n_in = static_cast<long>(clip.samples.size());
  for (size_t i = 0; i < n_out; ++i) {
    const double center = static_cast<double>(i) / ratio;
    const long lo = static_cast<long>(std::ceil(center - support));
    const long hi = static_cast<long>(std::floor(center + support));
    double acc = 0.0;
    for (long j = std::max(lo, 0L); j <= std::min(hi, n_in - 1); ++j) {
      const double x = (static_cast<double>(j) - center) * cutoff;
      const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
      const double w = 0.5 + 0.5 * std::cos(std::numbers::pi * x / kHalfTaps);
      acc += clip.samples[static_cast<size_t>(j)] * sinc * w * cutoff;
    }
    out.samples[i] = acc;
  }
  return out;
}

namespace {

template <typename T>
T ReadLE(std::istream& is) {
  unsigned char buf[sizeof(T)];
  is.read(reinterpret_cast<char*>(buf), sizeof(T));
  if (!is) throw ParseError("unexpected end of WAV data");
  std::uint64_t v = 0;
  for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  T out;
  if constexpr (sizeof(T) == 2) {
    const auto u = static_cast<std::uint16_t>(v);
    std::memcpy(&out, &u, sizeof(T));
  } else {
    const auto u = static_cast<std::uint32_t>(v);
    std::memcpy(&out, &u, sizeof(T));
  }
  return out;
}

template <typename T>
void WriteLE(std::ostream& os, T value) {
  std::uint64_t v = 0;
  if constexpr (sizeof(T) == 2) {
    std::uint16_t u;
    std::memcpy(&u, &value, sizeof(T));
    v = u;
  } else {
    std::uint32_t u;
    std::memcpy(&u, &value, sizeof(T));
    v = u;
  }
  for (size_t i = 0; i < sizeof(T); ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

AudioClip ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ParseError("cannot open " + path);
  char tag[4];
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "RIFF", 4) != 0) throw ParseError(path + ": not a RIFF file");
  ReadLE<std::uint32_t>(is);
  is.read(tag, 4);
  if (!is || std::memcmp(tag, "WAVE", 4) != 0) throw ParseError(path + ": not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::vector<char> data;
  while (is.read(tag, 4)) {
    const auto size = ReadLE<std::uint32_t>(is);
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = ReadLE<std::uint16_t>(is);
      channels = ReadLE<std::uint16_t>(is);
      rate = ReadLE<std::uint32_t>(is);
      ReadLE<std::uint32_t>(is);
      ReadLE<std::uint16_t>(is);
      bits = ReadLE<std::uint16_t>(is);
      if (size > 16) is.ignore(size - 16);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      data.resize(size);
      is.read(data.data(), size);
      if (!is) throw ParseError(path + ": truncated data chunk");
    } else {
      is.ignore(size + (size & 1));
    }
  }
  if (!have_fmt || channels == 0) throw ParseError(path + ": missing fmt chunk");
  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32) throw ParseError(path + ": only 16-bit PCM and 32-bit float WAV supported");

  const size_t bytes = bits / 8;
  const size_t frames = data.size() / (bytes * channels);
  AudioClip clip;
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(frames);
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const char* p = data.data() + (i * channels + c) * bytes;
      if (pcm16) {
        const auto u = static_cast<std::uint16_t>(static_cast<unsigned char>(p[0]) |
                                                  (static_cast<unsigned char>(p[1]) << 8));
        acc += static_cast<std::int16_t>(u) / 32768.0;
      } else {
        std::uint32_t u = 0;
        for (int k = 0; k < 4; ++k) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[k])) << (8 * k);
        float f;
        std::memcpy(&f, &u, 4);
        acc += f;
      }
    }
    clip.samples[i] = acc / channels;
  }
  ValidateClip(clip);
  for (double s : clip.samples) {
    if (std::abs(s) > 1.0) throw DataError(path + ": samples exceed full scale");
  }
  if (clip.sample_rate != kSampleRate) clip = Resample(clip, kSampleRate);
  return clip;
}

void WriteWav(const std::string& path, const AudioClip& clip) {
  ValidateClip(clip);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  os.write("RIFF", 4);
  WriteLE<std::uint32_t>(os, 36 + n * 2);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  WriteLE<std::uint32_t>(os, 16);
  WriteLE<std::uint16_t>(os, 1);
  WriteLE<std::uint16_t>(os, 1);
  WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate));
  WriteLE<std::uint32_t>(os, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  WriteLE<std::uint16_t>(os, 2);
  WriteLE<std::uint16_t>(os, 16);
  os.write("data", 4);
  WriteLE<std::uint32_t>(os, n * 2);
  for (double s : clip.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    const auto q = static_cast<std::int16_t>(std::min(32767L, std::lround(c * 32768.0)));
    WriteLE<std::int16_t>(os, q);
  }
  if (!os) throw Error("write failed: " + path);
}

}  // namespace emoxfer::dsp
