// Copyright 2026 The radarpr Authors
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

#include "archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <zlib.h>

#include "error.hpp"

namespace radarpr {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'P', 'R', 'A', 'R', 'C', 'H', '1'};

template <typename T>
void append(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T read() {
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  std::string read_bytes(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) fail(ErrorCode::kIntegrity, "archive truncated");
  }
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(const char* data, std::size_t n) {
  return static_cast<std::uint32_t>(crc32(0L, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(n)));
}

}  // namespace

void Archive::put(const std::string& name, std::string payload) {
  for (auto& [key, value] : entries_)
    if (key == name) {
      value = std::move(payload);
      return;
    }
  entries_.emplace_back(name, std::move(payload));
}

void Archive::put_tensor(const std::string& name, const std::vector<int>& shape, std::span<const float> values) {
  std::string payload;
  append<std::uint32_t>(payload, static_cast<std::uint32_t>(shape.size()));
  for (int d : shape) append<std::uint32_t>(payload, static_cast<std::uint32_t>(d));
  payload.append(reinterpret_cast<const char*>(values.data()), values.size() * sizeof(float));
  put(name, std::move(payload));
}

void Archive::put_u64(const std::string& name, std::uint64_t value) {
  std::string payload;
  append(payload, value);
  put(name, std::move(payload));
}

bool Archive::contains(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.first == name) return true;
  return false;
}

const std::string& Archive::get(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.first == name) return e.second;
  fail(ErrorCode::kIntegrity, fmt::format("archive has no entry '{}'", name));
}

std::vector<float> Archive::get_tensor(const std::string& name, std::vector<int>* shape) const {
  const std::string& payload = get(name);
  Reader r(payload);
  const auto rank = r.read<std::uint32_t>();
  std::vector<int> dims;
  std::size_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    dims.push_back(static_cast<int>(r.read<std::uint32_t>()));
    count *= static_cast<std::size_t>(dims.back());
  }
  if (r.remaining() != count * sizeof(float))
    fail(ErrorCode::kIntegrity, fmt::format("tensor '{}' payload size mismatch", name));
  std::vector<float> values(count);
  const std::string raw = r.read_bytes(count * sizeof(float));
  std::memcpy(values.data(), raw.data(), raw.size());
  if (shape) *shape = std::move(dims);
  return values;
}

std::uint64_t Archive::get_u64(const std::string& name) const {
  const std::string& payload = get(name);
  if (payload.size() != sizeof(std::uint64_t)) fail(ErrorCode::kIntegrity, fmt::format("entry '{}' is not u64", name));
  Reader r(payload);
  return r.read<std::uint64_t>();
}

std::string Archive::serialize() const {
  std::string out(kMagic, sizeof(kMagic));
  append<std::uint32_t>(out, static_cast<std::uint32_t>(entries_.size()));
  for (const auto& [name, payload] : entries_) {
    append<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    append<std::uint64_t>(out, payload.size());
    out += payload;
  }
  append<std::uint32_t>(out, crc(out.data(), out.size()));
  return out;
}

Archive Archive::deserialize(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 8 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0)
    fail(ErrorCode::kIntegrity, "not a radarpr archive (bad magic)");
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (stored != crc(bytes.data(), bytes.size() - 4)) fail(ErrorCode::kIntegrity, "archive checksum mismatch");

  const std::string body = bytes.substr(sizeof(kMagic), bytes.size() - sizeof(kMagic) - 4);
  Reader r(body);
  Archive a;
  const auto count = r.read<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.read<std::uint32_t>();
    std::string name = r.read_bytes(name_len);
    const auto len = r.read<std::uint64_t>();
    a.entries_.emplace_back(std::move(name), r.read_bytes(static_cast<std::size_t>(len)));
  }
  if (r.remaining() != 0) fail(ErrorCode::kIntegrity, "trailing bytes in archive");
  return a;
}

void Archive::save(const std::filesystem::path& path) const {
  const std::string bytes = serialize();
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", tmp.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::kIo, fmt::format("short write to '{}'", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
}

Archive Archive::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace radarpr
