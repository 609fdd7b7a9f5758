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

#ifndef MCULAB_PARAMS_IO_HPP_
#define MCULAB_PARAMS_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>

#include "mculab/nn.hpp"

namespace mcu {

// Binary ParamSet container, all integers and doubles little-endian:
//
//   "MCUPSET\0"               8-byte magic
//   u32 version               currently 1
//   u32 tensor_count
//   per tensor:
//     u32 name_len, name bytes (UTF-8, no terminator)
//     u32 ndims, u64 dims[ndims]
//     f64 values[prod(dims)]  row-major, raw IEEE-754 bits
//
// Round trips are bit-exact.
inline constexpr std::uint32_t kParamFormatVersion = 1;

std::string encode_params(const ParamSet& params);
ParamSet decode_params(const std::string& bytes);

void save_params(const std::filesystem::path& path, const ParamSet& params);
ParamSet load_params(const std::filesystem::path& path);

/// Stable 64-bit digest of the encoded bytes, hex formatted.
std::string params_digest(const ParamSet& params);

}  // namespace mcu

#endif  // MCULAB_PARAMS_IO_HPP_
