// Copyright 2026 The mculab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mculab/params_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mculab/errors.hpp"
#include "mculab/rng.hpp"

namespace mcu {
namespace {

static_assert(std::endian::native == std::endian::little,
              "params_io assumes a little-endian host");

constexpr char kMagic[8] = {'M', 'C', 'U', 'P', 'S', 'E', 'T', '\0'};

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) {
      throw IoError("parameter file truncated");
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_params(const ParamSet& params) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kParamFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& t : params.tensors()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    for (double v : t.values) put<double>(out, v);
  }
  return out;
}

ParamSet decode_params(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw IoError("not a parameter file (bad magic)");
  }
  const auto version = in.get<std::uint32_t>();
  if (version != kParamFormatVersion) {
    throw IoError("unsupported parameter format version " + std::to_string(version));
  }
  const auto count = in.get<std::uint32_t>();
  std::vector<Tensor> tensors;
  tensors.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    Tensor t;
    t.name = in.get_string(in.get<std::uint32_t>());
    const auto ndims = in.get<std::uint32_t>();
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < ndims; ++d) {
      t.shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>()));
      n *= t.shape.back();
    }
    t.values.resize(n);
    for (auto& v : t.values) v = in.get<double>();
    tensors.push_back(std::move(t));
  }
  if (!in.done()) throw IoError("trailing bytes in parameter file");
  return ParamSet(std::move(tensors));
}

void save_params(const std::filesystem::path& path, const ParamSet& params) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path.string());
  const std::string bytes = encode_params(params);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

ParamSet load_params(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("missing parameter checkpoint " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_params(ss.str());
}

std::string params_digest(const ParamSet& params) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(encode_params(params))));
  return buf;
}

}  // namespace mcu
