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

#include "ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "error.hpp"

namespace radarpr {
namespace fs = std::filesystem;

namespace {

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  return in;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

struct Meta {
  int azimuths = 0;
  int range_bins = 0;
  double range_resolution = 0.0;
};

Meta read_meta(const fs::path& path) {
  auto in = open_input(path);
  Meta meta;
  bool have_a = false, have_r = false, have_res = false;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::kFormat, fmt::format("'{}': expected key=value, got '{}'", path.string(), line));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "azimuths") {
        meta.azimuths = std::stoi(value);
        have_a = true;
      } else if (key == "range_bins") {
        meta.range_bins = std::stoi(value);
        have_r = true;
      } else if (key == "range_resolution_m") {
        meta.range_resolution = std::stod(value);
        have_res = true;
      }
    } catch (const std::logic_error&) {
      fail(ErrorCode::kFormat, fmt::format("'{}': bad value for {}", path.string(), key));
    }
  }
  if (!have_a || !have_r || !have_res)
    fail(ErrorCode::kFormat, fmt::format("'{}': missing azimuths/range_bins/range_resolution_m", path.string()));
  if (meta.azimuths < 4 || meta.range_bins < 1 || !(meta.range_resolution > 0.0))
    fail(ErrorCode::kFormat, fmt::format("'{}': invalid scan geometry", path.string()));
  return meta;
}

std::vector<Timestamp> read_timestamps(const fs::path& path) {
  auto in = open_input(path);
  std::vector<Timestamp> out;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(line, &used));
      if (used != line.size()) throw std::invalid_argument(line);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kFormat, fmt::format("'{}': bad timestamp '{}'", path.string(), line));
    }
    const std::size_t i = out.size() - 1;
    if (i > 0 && out[i] <= out[i - 1])
      fail(ErrorCode::kFormat, fmt::format("'{}': non-monotone timestamp at index {}", path.string(), i));
  }
  return out;
}

std::vector<PoseRecord> read_poses(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trim(line) != "timestamp,x,y,yaw")
    fail(ErrorCode::kFormat, fmt::format("'{}': expected header 'timestamp,x,y,yaw'", path.string()));
  std::vector<PoseRecord> poses;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field[4];
    for (auto& f : field) std::getline(row, f, ',');
    PoseRecord p;
    try {
      p.timestamp = std::stoll(field[0]);
      p.x = std::stod(field[1]);
      p.y = std::stod(field[2]);
      p.yaw = std::stod(field[3]);
    } catch (const std::logic_error&) {
      fail(ErrorCode::kFormat, fmt::format("'{}': bad pose row {}", path.string(), poses.size()));
    }
    if (!poses.empty() && p.timestamp <= poses.back().timestamp)
      fail(ErrorCode::kFormat,
           fmt::format("'{}': non-monotone pose timestamp at index {}", path.string(), poses.size()));
    poses.push_back(p);
  }
  if (poses.empty()) fail(ErrorCode::kFormat, fmt::format("'{}': no poses", path.string()));
  return poses;
}

}  // namespace

void PolarScan::validate() const {
  if (azimuths < 4 || range_bins < 1)
    fail(ErrorCode::kArgument, fmt::format("scan needs A >= 4 and R >= 1 (got {}x{})", azimuths, range_bins));
  if (!(range_resolution > 0.0)) fail(ErrorCode::kArgument, "scan range resolution must be positive");
  if (power.size() != static_cast<std::size_t>(azimuths) * range_bins)
    fail(ErrorCode::kArgument, "scan power grid size does not match A x R");
  for (float v : power)
    if (!(v >= 0.0f && v <= 1.0f)) fail(ErrorCode::kArgument, "scan power outside [0, 1]");
}

RadarSequence load_sequence(const fs::path& root, LoadStats* stats) {
  if (!fs::is_directory(root)) fail(ErrorCode::kIo, fmt::format("'{}' is not a directory", root.string()));
  if (!fs::exists(root / "timestamps.txt") && (!fs::is_directory(root / "scans") || fs::is_empty(root / "scans")))
    fail(ErrorCode::kEmpty, fmt::format("'{}' contains no scans", root.string()));
  const Meta meta = read_meta(root / "meta.txt");
  const auto timestamps = read_timestamps(root / "timestamps.txt");
  if (timestamps.empty()) fail(ErrorCode::kEmpty, fmt::format("'{}' contains no scans", root.string()));
  auto poses = read_poses(root / "poses.csv");

  RadarSequence seq;
  seq.name = root.filename().string();
  if (seq.name.empty()) seq.name = root.parent_path().filename().string();

  const std::size_t bytes = static_cast<std::size_t>(meta.azimuths) * meta.range_bins;
  std::vector<unsigned char> raw(bytes);
  std::size_t dropped = 0;
  for (const Timestamp ts : timestamps) {
    const fs::path file = root / "scans" / (std::to_string(ts) + ".bin");
    auto in = open_input(file);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (static_cast<std::size_t>(in.gcount()) != bytes || in.peek() != std::char_traits<char>::eof())
      fail(ErrorCode::kFormat, fmt::format("'{}': expected {} bytes", file.string(), bytes));
    if (ts < poses.front().timestamp || ts > poses.back().timestamp) {
      ++dropped;
      continue;
    }
    PolarScan scan;
    scan.azimuths = meta.azimuths;
    scan.range_bins = meta.range_bins;
    scan.range_resolution = meta.range_resolution;
    scan.timestamp = ts;
    scan.power.resize(bytes);
    std::transform(raw.begin(), raw.end(), scan.power.begin(),
                   [](unsigned char v) { return static_cast<float>(v) / 255.0f; });
    seq.scans.push_back(std::move(scan));
  }
  if (dropped * 10 > timestamps.size())
    fail(ErrorCode::kOutOfRange, fmt::format("'{}': {} of {} scans lie outside pose coverage", root.string(),
                                             dropped, timestamps.size()));
  if (dropped > 0)
    fmt::print(stderr, "warning: '{}': dropped {} of {} scans outside pose coverage\n", root.string(), dropped,
               timestamps.size());
  if (stats) {
    stats->scans_found = timestamps.size();
    stats->scans_dropped = dropped;
  }
  seq.poses = std::move(poses);
  return seq;
}

void write_sequence(const RadarSequence& seq, const fs::path& root) {
  if (seq.scans.empty()) fail(ErrorCode::kEmpty, "refusing to write a sequence without scans");
  std::error_code ec;
  fs::create_directories(root / "scans", ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create '{}': {}", (root / "scans").string(), ec.message()));

  const PolarScan& first = seq.scans.front();
  auto open_output = [](const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
    return out;
  };
  {
    auto out = open_output(root / "meta.txt");
    out << fmt::format("azimuths={}\nrange_bins={}\nrange_resolution_m={:.17g}\n", first.azimuths,
                       first.range_bins, first.range_resolution);
  }
  {
    auto out = open_output(root / "timestamps.txt");
    for (const auto& scan : seq.scans) out << scan.timestamp << '\n';
  }
  {
    auto out = open_output(root / "poses.csv");
    out << "timestamp,x,y,yaw\n";
    for (const auto& p : seq.poses) out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", p.timestamp, p.x, p.y, p.yaw);
  }
  std::vector<unsigned char> raw;
  for (const auto& scan : seq.scans) {
    if (scan.azimuths != first.azimuths || scan.range_bins != first.range_bins)
      fail(ErrorCode::kArgument, "all scans in a sequence must share dimensions");
    raw.resize(scan.power.size());
    std::transform(scan.power.begin(), scan.power.end(), raw.begin(), [](float v) {
      return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    });
    auto out = open_output(root / "scans" / (std::to_string(scan.timestamp) + ".bin"));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) fail(ErrorCode::kIo, fmt::format("short write for scan {}", scan.timestamp));
  }
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians + std::numbers::pi, two_pi);
  if (r < 0) r += two_pi;
  return r - std::numbers::pi;
}

PoseRecord pose_at(const std::vector<PoseRecord>& poses, Timestamp t) {
  if (poses.empty() || t < poses.front().timestamp || t > poses.back().timestamp)
    fail(ErrorCode::kOutOfRange, fmt::format("timestamp {} outside pose coverage", t));
  auto hi = std::lower_bound(poses.begin(), poses.end(), t,
                             [](const PoseRecord& p, Timestamp v) { return p.timestamp < v; });
  if (hi->timestamp == t) return *hi;
  const PoseRecord& b = *hi;
  const PoseRecord& a = *(hi - 1);
  const double w = static_cast<double>(t - a.timestamp) / static_cast<double>(b.timestamp - a.timestamp);
  PoseRecord out;
  out.timestamp = t;
  out.x = a.x + w * (b.x - a.x);
  out.y = a.y + w * (b.y - a.y);
  out.yaw = wrap_angle(a.yaw + w * wrap_angle(b.yaw - a.yaw));
  return out;
}

PoseRecord pose_at(const RadarSequence& seq, Timestamp t) { return pose_at(seq.poses, t); }

}  // namespace radarpr
