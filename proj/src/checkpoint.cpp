// Copyright 2026 The ttfs-engine Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttfs/checkpoint.hpp"

#include <zlib.h>

#include <cstring>
#include <fstream>

namespace ttfs {

namespace {

constexpr char kMagic[8] = {'T', 'T', 'F', 'S', 'C', 'K', '1', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::vector<char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, size_t& off, const std::string& path) {
  if (off + sizeof(T) > buf.size())
    throw IoError(path + ": truncated checkpoint at offset " +
                  std::to_string(off));
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

void put_f32_array(std::vector<char>& out, const Eigen::ArrayXd& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    put<float>(out, static_cast<float>(a[i]));
}

void get_f32_array(const std::vector<char>& buf, size_t& off,
                   const std::string& path, Eigen::ArrayXd& a) {
  for (Eigen::Index i = 0; i < a.size(); ++i)
    a[i] = static_cast<double>(get<float>(buf, off, path));
}

}  // namespace

void save_checkpoint(const std::string& path, const Graph& g, int epoch,
                     const AdamState* opt) {
  std::vector<char> out(kMagic, kMagic + 8);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(epoch));
  const std::string cfg = g.config().to_json();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.size()));
  out.insert(out.end(), cfg.begin(), cfg.end());

  const auto& params = g.params();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
  for (const ParamSlot& p : params) {
    put<std::uint16_t>(out, static_cast<std::uint16_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    put<std::uint8_t>(out, static_cast<std::uint8_t>(p.dims.size()));
    for (int d : p.dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    put_f32_array(out, p.value);
  }

  const bool with_opt = opt != nullptr && opt->m.size() == params.size();
  put<std::uint8_t>(out, with_opt ? 1 : 0);
  if (with_opt) {
    put<std::uint64_t>(out, static_cast<std::uint64_t>(opt->step));
    for (size_t i = 0; i < params.size(); ++i) {
      put_f32_array(out, opt->m[i]);
      put_f32_array(out, opt->v[i]);
    }
  }

  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data() + 8),
            static_cast<uInt>(out.size() - 8)));
  put<std::uint32_t>(out, crc);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed on " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(f)),
                        std::istreambuf_iterator<char>());
  if (buf.size() < 20 || std::memcmp(buf.data(), kMagic, 8) != 0)
    throw IoError(path + ": not a checkpoint (bad magic)");
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(buf.data() + 8),
            static_cast<uInt>(buf.size() - 12)));
  if (crc != stored_crc) throw IntegrityError(path + ": CRC mismatch");

  size_t off = 8;
  const std::uint32_t version = get<std::uint32_t>(buf, off, path);
  if (version != kVersion)
    throw IoError(path + ": unsupported checkpoint version " +
                  std::to_string(version));
  const std::uint32_t epoch = get<std::uint32_t>(buf, off, path);
  const std::uint32_t cfg_len = get<std::uint32_t>(buf, off, path);
  if (off + cfg_len > buf.size()) throw IoError(path + ": truncated config");
  const std::string cfg_json(buf.data() + off, cfg_len);
  off += cfg_len;

  LoadedCheckpoint lc;
  lc.epoch = static_cast<int>(epoch);
  lc.graph = Graph::build(ModelConfig::from_json(cfg_json), /*seed=*/0);
  auto& params = lc.graph.params();

  const std::uint32_t n_slots = get<std::uint32_t>(buf, off, path);
  if (n_slots != params.size())
    throw IoError(path + ": expected " + std::to_string(params.size()) +
                  " parameter slots, found " + std::to_string(n_slots));
  std::vector<bool> seen(params.size(), false);
  for (std::uint32_t s = 0; s < n_slots; ++s) {
    const std::uint16_t name_len = get<std::uint16_t>(buf, off, path);
    if (off + name_len > buf.size())
      throw IoError(path + ": truncated slot name");
    const std::string name(buf.data() + off, name_len);
    off += name_len;
    const int idx = lc.graph.param_index(name);
    if (idx < 0) throw IoError(path + ": unknown parameter slot " + name);
    if (seen[static_cast<size_t>(idx)])
      throw IoError(path + ": duplicate parameter slot " + name);
    seen[static_cast<size_t>(idx)] = true;
    ParamSlot& p = params[static_cast<size_t>(idx)];
    const std::uint8_t ndims = get<std::uint8_t>(buf, off, path);
    if (ndims != p.dims.size())
      throw IoError(path + ": rank mismatch for " + name);
    for (std::uint8_t d = 0; d < ndims; ++d) {
      const std::uint32_t dim = get<std::uint32_t>(buf, off, path);
      if (static_cast<int>(dim) != p.dims[d])
        throw IoError(path + ": shape mismatch for " + name);
    }
    get_f32_array(buf, off, path, p.value);
  }
  for (size_t i = 0; i < params.size(); ++i)
    if (!seen[i])
      throw IoError(path + ": missing parameter slot " + params[i].name);

  const std::uint8_t has_opt = get<std::uint8_t>(buf, off, path);
  if (has_opt) {
    lc.has_optimizer = true;
    lc.optimizer.init(params);
    lc.optimizer.step =
        static_cast<std::int64_t>(get<std::uint64_t>(buf, off, path));
    for (size_t i = 0; i < params.size(); ++i) {
      get_f32_array(buf, off, path, lc.optimizer.m[i]);
      get_f32_array(buf, off, path, lc.optimizer.v[i]);
    }
  }
  if (off != buf.size() - 4)
    throw IoError(path + ": trailing bytes at offset " + std::to_string(off));
  return lc;
}

}  // namespace ttfs
