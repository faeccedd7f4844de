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

#include "ttfs/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <fstream>

#include "ttfs/common.hpp"

namespace ttfs {

namespace {

constexpr char kMagic[8] = {'T', 'T', 'F', 'S', 'D', 'S', '1', '\0'};

std::vector<char> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  f.seekg(0, std::ios::end);
  const std::streamoff len = f.tellg();
  f.seekg(0);
  std::vector<char> buf(static_cast<size_t>(len));
  if (len > 0) f.read(buf.data(), len);
  if (!f) throw IoError("short read on " + path);
  return buf;
}

std::uint32_t be32(const unsigned char* p) {
  return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
         (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

// Little-endian scalar append/read. The build targets little-endian hosts;
// the explicit byte order keeps files portable anyway.
template <class T>
void put(std::vector<char>& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<char>& buf, size_t& off, const std::string& path) {
  if (off + sizeof(T) > buf.size())
    throw IoError(path + ": truncated at offset " + std::to_string(off));
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  off += sizeof(T);
  return v;
}

}  // namespace

Dataset read_idx_dataset(const std::string& images_path,
                         const std::string& labels_path) {
  const std::vector<char> img = read_file(images_path);
  const std::vector<char> lab = read_file(labels_path);
  const auto* ip = reinterpret_cast<const unsigned char*>(img.data());
  const auto* lp = reinterpret_cast<const unsigned char*>(lab.data());

  if (img.size() < 16)
    throw IoError(images_path + ": truncated IDX header");
  if (be32(ip) != 0x00000803u)
    throw IoError(images_path + ": bad IDX magic at offset 0");
  const std::uint32_t n = be32(ip + 4);
  const std::uint32_t rows = be32(ip + 8);
  const std::uint32_t cols = be32(ip + 12);
  const size_t need = 16 + static_cast<size_t>(n) * rows * cols;
  if (img.size() != need)
    throw IoError(images_path + ": expected " + std::to_string(need) +
                  " bytes, found " + std::to_string(img.size()));

  if (lab.size() < 8) throw IoError(labels_path + ": truncated IDX header");
  if (be32(lp) != 0x00000801u)
    throw IoError(labels_path + ": bad IDX magic at offset 0");
  const std::uint32_t ln = be32(lp + 4);
  if (lab.size() != 8 + static_cast<size_t>(ln))
    throw IoError(labels_path + ": truncated label payload");
  if (ln != n)
    throw IoError("image/label count mismatch: " + std::to_string(n) +
                  " images vs " + std::to_string(ln) + " labels");

  Dataset ds;
  ds.images.reshape({static_cast<int>(n), 1, static_cast<int>(rows),
                     static_cast<int>(cols)});
  const unsigned char* px = ip + 16;
  for (Eigen::Index i = 0; i < ds.images.count(); ++i)
    ds.images.v[i] = static_cast<double>(px[i]) / 255.0;
  ds.labels.resize(n);
  int max_label = -1;
  for (std::uint32_t i = 0; i < n; ++i) {
    ds.labels[i] = lp[8 + i];
    max_label = std::max<int>(max_label, ds.labels[i]);
  }
  ds.classes = max_label + 1;
  return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
  std::vector<char> out(kMagic, kMagic + 8);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ds.n()));
  const std::vector<int> sample_dims(ds.images.dims.begin() + 1,
                                     ds.images.dims.end());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(sample_dims.size()));
  for (int d : sample_dims) put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (Eigen::Index i = 0; i < ds.images.count(); ++i)
    put<float>(out, static_cast<float>(ds.images.v[i]));
  for (std::uint16_t l : ds.labels) put<std::uint16_t>(out, l);
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(out.data() + 8),
            static_cast<uInt>(out.size() - 8)));
  put<std::uint32_t>(out, crc);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("write failed on " + path);
}

Dataset read_dataset(const std::string& path) {
  const std::vector<char> buf = read_file(path);
  if (buf.size() < 8 + 4 + 4 + 4 ||
      std::memcmp(buf.data(), kMagic, 8) != 0)
    throw IoError(path + ": not a dataset container (bad magic)");
  const std::uint32_t stored_crc = [&] {
    std::uint32_t v;
    std::memcpy(&v, buf.data() + buf.size() - 4, 4);
    return v;
  }();
  const std::uint32_t crc = static_cast<std::uint32_t>(
      crc32(0, reinterpret_cast<const Bytef*>(buf.data() + 8),
            static_cast<uInt>(buf.size() - 12)));
  if (crc != stored_crc)
    throw IntegrityError(path + ": CRC mismatch (stored " +
                         std::to_string(stored_crc) + ", computed " +
                         std::to_string(crc) + ")");

  size_t off = 8;
  const std::uint32_t n = get<std::uint32_t>(buf, off, path);
  const std::uint32_t nd = get<std::uint32_t>(buf, off, path);
  if (nd == 0 || nd > 3) throw IoError(path + ": bad sample dims count");
  std::vector<int> dims{static_cast<int>(n)};
  Eigen::Index per_sample = 1;
  for (std::uint32_t i = 0; i < nd; ++i) {
    const std::uint32_t d = get<std::uint32_t>(buf, off, path);
    dims.push_back(static_cast<int>(d));
    per_sample *= d;
  }
  const size_t want =
      off + static_cast<size_t>(n) * per_sample * 4 + static_cast<size_t>(n) * 2 + 4;
  if (buf.size() != want)
    throw IoError(path + ": payload length mismatch at offset " +
                  std::to_string(off));

  Dataset ds;
  ds.images.reshape(dims);
  for (Eigen::Index i = 0; i < ds.images.count(); ++i) {
    float v;
    std::memcpy(&v, buf.data() + off, 4);
    off += 4;
    ds.images.v[i] = static_cast<double>(v);
  }
  ds.labels.resize(n);
  int max_label = -1;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint16_t l;
    std::memcpy(&l, buf.data() + off, 2);
    off += 2;
    ds.labels[i] = l;
    max_label = std::max<int>(max_label, l);
  }
  ds.classes = max_label + 1;
  return ds;
}

Dataset dataset_head(const Dataset& ds, int count) {
  if (count >= ds.n()) return ds;
  Dataset out;
  std::vector<int> dims = ds.images.dims;
  dims[0] = count;
  out.images.reshape(dims);
  out.images.v =
      ds.images.v.segment(0, static_cast<Eigen::Index>(count) *
                                 ds.images.sample_size());
  out.labels.assign(ds.labels.begin(), ds.labels.begin() + count);
  out.classes = ds.classes;
  return out;
}

}  // namespace ttfs
