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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "embedder.hpp"
#include "geometry.hpp"
#include "ingest.hpp"

namespace radarpr {

using DistMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingSet {
  Eigen::MatrixXf embeddings;  // N x D, unit rows
  std::vector<Timestamp> timestamps;
  std::vector<Eigen::Vector2d> positions;

  std::size_t size() const { return timestamps.size(); }
  void validate() const;
};

struct EvalConfig {
  double boundary = 25.0;  // metres
  std::vector<int> n_candidates{1, 2, 3};
  std::vector<double> precision_targets{95.0, 98.0, 99.0};
  double match_precision = 80.0;  // operating point drawn in the Recall@P match matrix
  int match_n = 1;                // candidates drawn in the Recall@N match matrix

  void validate() const;
};

/// Optional per-frame random spin applied before embedding (query side).
struct QuerySpin {
  std::uint64_t seed = 0;
};

EmbeddingSet build_embedding_set(const Embedder& model, const RadarSequence& seq, const GridSpec& grid,
                                 std::optional<QuerySpin> spin = std::nullopt);

/// Euclidean distance between every query and database embedding.
DistMatrix distance_matrix(const EmbeddingSet& queries, const EmbeddingSet& database);

/// 1 where the planar distance between positions is <= boundary.
MaskMatrix ground_truth_matrix(const EmbeddingSet& queries, const EmbeddingSet& database, double boundary);

/// Fraction of localisable queries (at least one true entry) with a true
/// entry among their n closest candidates; ties go to the lower index.
double recall_at_n(const DistMatrix& dist, const MaskMatrix& gt, int n);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Nearest-neighbour precision/recall swept over every distinct NN distance.
/// Each query predicts its nearest database entry when that distance is
/// within the threshold. Recall is over localisable queries only.
std::vector<PrPoint> pr_curve(const DistMatrix& dist, const MaskMatrix& gt);

/// Maximum recall among points with precision >= target_percent / 100.
double recall_at_precision(const std::vector<PrPoint>& curve, double target_percent);

/// Operating point used for recall_at_precision, if any point qualifies.
std::optional<PrPoint> operating_point(const std::vector<PrPoint>& curve, double target_percent);

struct FScores {
  double f1 = 0.0;
  double f2 = 0.0;
  double f05 = 0.0;
};

double f_beta(double precision, double recall, double beta);
FScores f_scores(const std::vector<PrPoint>& curve);

/// Cells marked by a retrieval rule, split into true and false positives.
struct MatchMatrices {
  MaskMatrix true_positive;
  MaskMatrix false_positive;
};

/// Nearest neighbours accepted at `threshold`.
MatchMatrices threshold_matches(const DistMatrix& dist, const MaskMatrix& gt, double threshold);
/// Top-n candidates of every query.
MatchMatrices top_n_matches(const DistMatrix& dist, const MaskMatrix& gt, int n);

struct EvalReport {
  std::size_t queries = 0;
  std::size_t database = 0;
  std::size_t localisable_queries = 0;
  double boundary = 0.0;
  std::vector<PrPoint> pr_curve;
  std::map<double, double> recall_at_p;
  std::map<int, double> recall_at_n;
  FScores f_scores;
  double match_precision = 0.0;
  std::optional<double> match_threshold;
  int match_n = 1;
  std::map<std::string, std::string> files;  // role -> file name, relative to the report
};

/// Compute every metric and write matrices plus report.json into out_dir.
EvalReport evaluate(const EmbeddingSet& queries, const EmbeddingSet& database, const EvalConfig& cfg,
                    const std::filesystem::path& out_dir);

void save_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport load_report(const std::filesystem::path& path);

// Matrix files: magic "RPEM", u32 rows, u32 cols, row-major little-endian f32;
// boolean matrices use magic "RPEB" and one 0/1 byte per entry.
void write_matrix(const DistMatrix& m, const std::filesystem::path& path);
DistMatrix read_matrix(const std::filesystem::path& path);
void write_mask(const MaskMatrix& m, const std::filesystem::path& path);
MaskMatrix read_mask(const std::filesystem::path& path);

/// Embedding set on disk: embeddings.bin (RPEM) + index.csv
/// (`timestamp,x,y`).
void save_embedding_set(const EmbeddingSet& set, const std::filesystem::path& dir);
EmbeddingSet load_embedding_set(const std::filesystem::path& dir);

/// PNG rendering of a report's matrices and PR curve: distance (min black,
/// max white), ground truth (true white), match matrices (true positives
/// green, false positives red, everything else black).
std::vector<std::filesystem::path> render_matrices(const std::filesystem::path& report_path,
                                                   const std::filesystem::path& out_dir);

}  // namespace radarpr
