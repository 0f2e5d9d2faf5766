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

#include "evaluation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "error.hpp"
#include "rng.hpp"

namespace radarpr {
namespace fs = std::filesystem;

void EmbeddingSet::validate() const {
  const auto n = static_cast<std::size_t>(embeddings.rows());
  if (n == 0) fail(ErrorCode::kArgument, "embedding set is empty");
  if (timestamps.size() != n || positions.size() != n)
    fail(ErrorCode::kArgument, "embedding set arrays are not length-aligned");
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i)
    if (std::abs(embeddings.row(i).norm() - 1.0f) > 1e-5f)
      fail(ErrorCode::kArgument, fmt::format("embedding {} is not unit norm", i));
}

void EvalConfig::validate() const {
  if (!(boundary > 0.0)) fail(ErrorCode::kConfig, "eval boundary must be positive");
  for (int n : n_candidates)
    if (n < 1) fail(ErrorCode::kConfig, "eval n_candidates must be >= 1");
  for (double t : precision_targets)
    if (!(t > 0.0 && t <= 100.0)) fail(ErrorCode::kConfig, "precision targets must lie in (0, 100]");
  if (!(match_precision > 0.0 && match_precision <= 100.0)) fail(ErrorCode::kConfig, "match_precision must lie in (0, 100]");
  if (match_n < 1) fail(ErrorCode::kConfig, "match_n must be >= 1");
}

EmbeddingSet build_embedding_set(const Embedder& model, const RadarSequence& seq, const GridSpec& grid,
                                 std::optional<QuerySpin> spin) {
  if (seq.scans.empty()) fail(ErrorCode::kEmpty, "cannot embed an empty sequence");
  EmbeddingSet set;
  std::optional<Rng> rng;
  if (spin) rng.emplace(spin->seed);

  std::vector<CartesianFrame> frames;
  frames.reserve(seq.scans.size());
  for (const auto& scan : seq.scans) {
    if (rng) {
      frames.push_back(polar_to_cartesian(spin_polar(scan, random_spin(*rng, scan.azimuths)), grid));
    } else {
      frames.push_back(polar_to_cartesian(scan, grid));
    }
    const PoseRecord p = pose_at(seq, scan.timestamp);
    set.timestamps.push_back(scan.timestamp);
    set.positions.emplace_back(p.x, p.y);
  }
  set.embeddings = model.embed_matrix(frames);
  return set;
}

DistMatrix distance_matrix(const EmbeddingSet& queries, const EmbeddingSet& database) {
  if (queries.embeddings.cols() != database.embeddings.cols())
    fail(ErrorCode::kArgument, fmt::format("embedding dimension mismatch: {} vs {}", queries.embeddings.cols(),
                                           database.embeddings.cols()));
  const Eigen::MatrixXd q = queries.embeddings.cast<double>();
  const Eigen::MatrixXd d = database.embeddings.cast<double>();
  DistMatrix out(q.rows(), d.rows());
  for (Eigen::Index i = 0; i < q.rows(); ++i)
    for (Eigen::Index j = 0; j < d.rows(); ++j) out(i, j) = static_cast<float>((q.row(i) - d.row(j)).norm());
  return out;
}

MaskMatrix ground_truth_matrix(const EmbeddingSet& queries, const EmbeddingSet& database, double boundary) {
  MaskMatrix out(static_cast<Eigen::Index>(queries.positions.size()),
                 static_cast<Eigen::Index>(database.positions.size()));
  for (std::size_t i = 0; i < queries.positions.size(); ++i)
    for (std::size_t j = 0; j < database.positions.size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (queries.positions[i] - database.positions[j]).norm() <= boundary ? 1 : 0;
  return out;
}

namespace {

void check_shapes(const DistMatrix& dist, const MaskMatrix& gt) {
  if (dist.rows() != gt.rows() || dist.cols() != gt.cols())
    fail(ErrorCode::kArgument, fmt::format("distance {}x{} and ground truth {}x{} differ in shape", dist.rows(),
                                           dist.cols(), gt.rows(), gt.cols()));
}

std::vector<Eigen::Index> top_candidates(const DistMatrix& dist, Eigen::Index q, int n) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(dist.cols()));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + n, idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const float da = dist(q, a), db = dist(q, b);
    return da < db || (da == db && a < b);
  });
  idx.resize(static_cast<std::size_t>(n));
  return idx;
}

Eigen::Index nearest(const DistMatrix& dist, Eigen::Index q) {
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < dist.cols(); ++j)
    if (dist(q, j) < dist(q, best)) best = j;
  return best;
}

bool has_match(const MaskMatrix& gt, Eigen::Index q) { return (gt.row(q).array() != 0).any(); }

}  // namespace

double recall_at_n(const DistMatrix& dist, const MaskMatrix& gt, int n) {
  check_shapes(dist, gt);
  if (n < 1 || n > dist.cols())
    fail(ErrorCode::kArgument, fmt::format("recall_at_n: N={} outside [1, {}]", n, dist.cols()));
  std::size_t localisable = 0, hits = 0;
  for (Eigen::Index q = 0; q < dist.rows(); ++q) {
    if (!has_match(gt, q)) continue;
    ++localisable;
    for (Eigen::Index j : top_candidates(dist, q, n))
      if (gt(q, j)) {
        ++hits;
        break;
      }
  }
  return localisable ? static_cast<double>(hits) / static_cast<double>(localisable) : 0.0;
}

std::vector<PrPoint> pr_curve(const DistMatrix& dist, const MaskMatrix& gt) {
  check_shapes(dist, gt);
  if (dist.cols() == 0) fail(ErrorCode::kArgument, "pr_curve needs a non-empty database");
  struct Nn {
    float distance;
    bool correct;
  };
  std::vector<Nn> nns;
  std::size_t localisable = 0;
  for (Eigen::Index q = 0; q < dist.rows(); ++q) {
    const Eigen::Index j = nearest(dist, q);
    nns.push_back({dist(q, j), gt(q, j) != 0});
    if (has_match(gt, q)) ++localisable;
  }
  if (localisable == 0) fail(ErrorCode::kArgument, "pr_curve: recall undefined, no query has a true match");
  std::sort(nns.begin(), nns.end(), [](const Nn& a, const Nn& b) { return a.distance < b.distance; });

  std::vector<PrPoint> curve;
  std::size_t predicted = 0, correct = 0;
  for (std::size_t i = 0; i < nns.size(); ++i) {
    ++predicted;
    if (nns[i].correct) ++correct;
    if (i + 1 < nns.size() && nns[i + 1].distance == nns[i].distance) continue;
    curve.push_back({nns[i].distance, static_cast<double>(correct) / static_cast<double>(predicted),
                     static_cast<double>(correct) / static_cast<double>(localisable)});
  }
  return curve;
}

std::optional<PrPoint> operating_point(const std::vector<PrPoint>& curve, double target_percent) {
  std::optional<PrPoint> best;
  const double target = target_percent / 100.0 - 1e-12;
  for (const PrPoint& p : curve)
    if (p.precision >= target && (!best || p.recall > best->recall)) best = p;
  return best;
}

double recall_at_precision(const std::vector<PrPoint>& curve, double target_percent) {
  const auto p = operating_point(curve, target_percent);
  return p ? p->recall : 0.0;
}

double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  return denom > 0.0 ? (1.0 + b2) * precision * recall / denom : 0.0;
}

FScores f_scores(const std::vector<PrPoint>& curve) {
  FScores f;
  for (const PrPoint& p : curve) {
    f.f1 = std::max(f.f1, f_beta(p.precision, p.recall, 1.0));
    f.f2 = std::max(f.f2, f_beta(p.precision, p.recall, 2.0));
    f.f05 = std::max(f.f05, f_beta(p.precision, p.recall, 0.5));
  }
  return f;
}

MatchMatrices threshold_matches(const DistMatrix& dist, const MaskMatrix& gt, double threshold) {
  check_shapes(dist, gt);
  MatchMatrices m{MaskMatrix::Zero(dist.rows(), dist.cols()), MaskMatrix::Zero(dist.rows(), dist.cols())};
  for (Eigen::Index q = 0; q < dist.rows(); ++q) {
    const Eigen::Index j = nearest(dist, q);
    if (dist(q, j) > threshold) continue;
    (gt(q, j) ? m.true_positive : m.false_positive)(q, j) = 1;
  }
  return m;
}

MatchMatrices top_n_matches(const DistMatrix& dist, const MaskMatrix& gt, int n) {
  check_shapes(dist, gt);
  n = std::min<int>(n, static_cast<int>(dist.cols()));
  MatchMatrices m{MaskMatrix::Zero(dist.rows(), dist.cols()), MaskMatrix::Zero(dist.rows(), dist.cols())};
  for (Eigen::Index q = 0; q < dist.rows(); ++q)
    for (Eigen::Index j : top_candidates(dist, q, n)) (gt(q, j) ? m.true_positive : m.false_positive)(q, j) = 1;
  return m;
}

// ---------------------------------------------------------------------------
// Files

static_assert(std::endian::native == std::endian::little, "matrix I/O assumes a little-endian host");

namespace {

template <typename Scalar>
void write_grid(const Scalar* data, Eigen::Index rows, Eigen::Index cols, const char* magic, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  const auto r = static_cast<std::uint32_t>(rows), c = static_cast<std::uint32_t>(cols);
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&r), 4);
  out.write(reinterpret_cast<const char*>(&c), 4);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(Scalar) * rows * cols));
  if (!out) fail(ErrorCode::kIo, fmt::format("short write to '{}'", path.string()));
}

template <typename Matrix>
Matrix read_grid(const char* magic, const fs::path& path) {
  using Scalar = typename Matrix::Scalar;
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  char m[4];
  std::uint32_t rows = 0, cols = 0;
  in.read(m, 4);
  in.read(reinterpret_cast<char*>(&rows), 4);
  in.read(reinterpret_cast<char*>(&cols), 4);
  if (!in || std::memcmp(m, magic, 4) != 0)
    fail(ErrorCode::kFormat, fmt::format("'{}' is not a {:.4} matrix file", path.string(), magic));
  Matrix out(rows, cols);
  in.read(reinterpret_cast<char*>(out.data()), static_cast<std::streamsize>(sizeof(Scalar) * rows * cols));
  if (!in || in.peek() != std::char_traits<char>::eof())
    fail(ErrorCode::kFormat, fmt::format("'{}': payload does not match {}x{}", path.string(), rows, cols));
  return out;
}

}  // namespace

void write_matrix(const DistMatrix& m, const fs::path& path) { write_grid(m.data(), m.rows(), m.cols(), "RPEM", path); }
DistMatrix read_matrix(const fs::path& path) { return read_grid<DistMatrix>("RPEM", path); }
void write_mask(const MaskMatrix& m, const fs::path& path) { write_grid(m.data(), m.rows(), m.cols(), "RPEB", path); }
MaskMatrix read_mask(const fs::path& path) {
  MaskMatrix m = read_grid<MaskMatrix>("RPEB", path);
  if ((m.array() > 1).any()) fail(ErrorCode::kFormat, fmt::format("'{}': boolean entries must be 0 or 1", path.string()));
  return m;
}

void save_embedding_set(const EmbeddingSet& set, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create '{}'", dir.string()));
  write_matrix(DistMatrix(set.embeddings), dir / "embeddings.bin");
  std::ofstream out(dir / "index.csv", std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", (dir / "index.csv").string()));
  out << "timestamp,x,y\n";
  for (std::size_t i = 0; i < set.size(); ++i)
    out << fmt::format("{},{:.17g},{:.17g}\n", set.timestamps[i], set.positions[i].x(), set.positions[i].y());
}

EmbeddingSet load_embedding_set(const fs::path& dir) {
  EmbeddingSet set;
  set.embeddings = read_matrix(dir / "embeddings.bin");
  std::ifstream in(dir / "index.csv");
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", (dir / "index.csv").string()));
  std::string line;
  if (!std::getline(in, line) || line != "timestamp,x,y")
    fail(ErrorCode::kFormat, fmt::format("'{}': expected header 'timestamp,x,y'", (dir / "index.csv").string()));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    long long ts = 0;
    double x = 0, y = 0;
    if (std::sscanf(line.c_str(), "%lld,%lf,%lf", &ts, &x, &y) != 3)
      fail(ErrorCode::kFormat, fmt::format("'{}': bad row '{}'", (dir / "index.csv").string(), line));
    set.timestamps.push_back(ts);
    set.positions.emplace_back(x, y);
  }
  set.validate();
  return set;
}

// ---------------------------------------------------------------------------
// Report

EvalReport evaluate(const EmbeddingSet& queries, const EmbeddingSet& database, const EvalConfig& cfg,
                    const fs::path& out_dir) {
  cfg.validate();
  queries.validate();
  database.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::kIo, fmt::format("cannot create '{}'", out_dir.string()));

  const DistMatrix dist = distance_matrix(queries, database);
  const MaskMatrix gt = ground_truth_matrix(queries, database, cfg.boundary);

  EvalReport r;
  r.queries = queries.size();
  r.database = database.size();
  r.boundary = cfg.boundary;
  for (Eigen::Index q = 0; q < gt.rows(); ++q)
    if (has_match(gt, q)) ++r.localisable_queries;
  r.pr_curve = pr_curve(dist, gt);
  for (double t : cfg.precision_targets) r.recall_at_p[t] = recall_at_precision(r.pr_curve, t);
  for (int n : cfg.n_candidates)
    r.recall_at_n[n] = recall_at_n(dist, gt, std::min<int>(n, static_cast<int>(dist.cols())));
  r.f_scores = f_scores(r.pr_curve);
  r.match_precision = cfg.match_precision;
  r.match_n = cfg.match_n;
  if (auto op = operating_point(r.pr_curve, cfg.match_precision)) r.match_threshold = op->threshold;

  write_matrix(dist, out_dir / "distance.bin");
  write_mask(gt, out_dir / "gt.bin");
  const MatchMatrices by_threshold =
      r.match_threshold ? threshold_matches(dist, gt, *r.match_threshold)
                        : MatchMatrices{MaskMatrix::Zero(gt.rows(), gt.cols()), MaskMatrix::Zero(gt.rows(), gt.cols())};
  const MatchMatrices by_rank = top_n_matches(dist, gt, cfg.match_n);
  write_mask(by_threshold.true_positive, out_dir / "match_precision_tp.bin");
  write_mask(by_threshold.false_positive, out_dir / "match_precision_fp.bin");
  write_mask(by_rank.true_positive, out_dir / "match_n_tp.bin");
  write_mask(by_rank.false_positive, out_dir / "match_n_fp.bin");
  r.files = {{"distance_matrix", "distance.bin"},
             {"gt_matrix", "gt.bin"},
             {"match_precision_tp", "match_precision_tp.bin"},
             {"match_precision_fp", "match_precision_fp.bin"},
             {"match_n_tp", "match_n_tp.bin"},
             {"match_n_fp", "match_n_fp.bin"}};
  save_report(r, out_dir / "report.json");
  return r;
}

namespace {

std::string number_key(double v) { return fmt::format("{:g}", v); }

}  // namespace

void save_report(const EvalReport& r, const fs::path& path) {
  using nlohmann::json;
  json j;
  j["queries"] = r.queries;
  j["database"] = r.database;
  j["localisable_queries"] = r.localisable_queries;
  j["boundary_m"] = r.boundary;
  for (const auto& [n, v] : r.recall_at_n) j["recall_at_n"][std::to_string(n)] = v;
  for (const auto& [p, v] : r.recall_at_p) j["recall_at_precision"][number_key(p)] = v;
  j["f_scores"] = {{"f1", r.f_scores.f1}, {"f2", r.f_scores.f2}, {"f0.5", r.f_scores.f05}};
  j["pr_curve"] = json::array();
  for (const auto& p : r.pr_curve) j["pr_curve"].push_back({p.threshold, p.precision, p.recall});
  j["match_precision"] = r.match_precision;
  j["match_threshold"] = r.match_threshold ? json(*r.match_threshold) : json(nullptr);
  j["match_n"] = r.match_n;
  j["files"] = r.files;
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
}

EvalReport load_report(const fs::path& path) {
  using nlohmann::json;
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  EvalReport r;
  try {
    const json j = json::parse(in);
    r.queries = j.at("queries").get<std::size_t>();
    r.database = j.at("database").get<std::size_t>();
    r.localisable_queries = j.at("localisable_queries").get<std::size_t>();
    r.boundary = j.at("boundary_m").get<double>();
    for (const auto& [k, v] : j.at("recall_at_n").items()) r.recall_at_n[std::stoi(k)] = v.get<double>();
    for (const auto& [k, v] : j.at("recall_at_precision").items()) r.recall_at_p[std::stod(k)] = v.get<double>();
    r.f_scores = {j.at("f_scores").at("f1").get<double>(), j.at("f_scores").at("f2").get<double>(),
                  j.at("f_scores").at("f0.5").get<double>()};
    for (const auto& p : j.at("pr_curve")) r.pr_curve.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
    r.match_precision = j.at("match_precision").get<double>();
    if (!j.at("match_threshold").is_null()) r.match_threshold = j.at("match_threshold").get<double>();
    r.match_n = j.at("match_n").get<int>();
    r.files = j.at("files").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, fmt::format("'{}': {}", path.string(), e.what()));
  }
  return r;
}

}  // namespace radarpr
