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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include <fmt/format.h>
#include <png.h>

#include "error.hpp"
#include "evaluation.hpp"

namespace radarpr {
namespace fs = std::filesystem;

namespace {

struct Image {
  int width = 0, height = 0;
  std::vector<std::uint8_t> rgb;

  Image(int w, int h, std::uint8_t fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, fill) {}
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    auto* p = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
};

void write_png(const Image& img, const fs::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) fail(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorCode::kIo, "libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, fmt::format("libpng failed writing '{}'", path.string()));
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    png_write_row(png, const_cast<png_bytep>(&img.rgb[static_cast<std::size_t>(y) * img.width * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Image grayscale(const DistMatrix& m) {
  Image img(static_cast<int>(m.cols()), static_cast<int>(m.rows()), 0);
  const float lo = m.size() ? m.minCoeff() : 0.0f;
  const float hi = m.size() ? m.maxCoeff() : 0.0f;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const float t = hi > lo ? (m(r, c) - lo) / (hi - lo) : 0.0f;
      const auto v = static_cast<std::uint8_t>(std::lround(t * 255.0f));
      img.set(static_cast<int>(c), static_cast<int>(r), v, v, v);
    }
  return img;
}

Image mask_image(const MaskMatrix& m) {
  Image img(static_cast<int>(m.cols()), static_cast<int>(m.rows()), 0);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c)) img.set(static_cast<int>(c), static_cast<int>(r), 255, 255, 255);
  return img;
}

Image match_image(const MaskMatrix& tp, const MaskMatrix& fp) {
  Image img(static_cast<int>(tp.cols()), static_cast<int>(tp.rows()), 0);
  for (Eigen::Index r = 0; r < tp.rows(); ++r)
    for (Eigen::Index c = 0; c < tp.cols(); ++c) {
      if (tp(r, c)) img.set(static_cast<int>(c), static_cast<int>(r), 0, 255, 0);
      else if (fp(r, c)) img.set(static_cast<int>(c), static_cast<int>(r), 255, 0, 0);
    }
  return img;
}

// Precision (y) against recall (x) on a white canvas.
Image curve_image(const std::vector<PrPoint>& curve) {
  constexpr int kW = 400, kH = 300, kMargin = 30;
  Image img(kW, kH, 255);
  const int pw = kW - 2 * kMargin, ph = kH - 2 * kMargin;
  for (int x = kMargin; x <= kMargin + pw; ++x) img.set(x, kMargin + ph, 0, 0, 0);
  for (int y = kMargin; y <= kMargin + ph; ++y) img.set(kMargin, y, 0, 0, 0);
  auto to_px = [&](const PrPoint& p) {
    return std::pair<double, double>{kMargin + p.recall * pw, kMargin + (1.0 - p.precision) * ph};
  };
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto [x0, y0] = to_px(curve[i]);
    const auto [x1, y1] = to_px(curve[i + 1]);
    const int steps = std::max(1, static_cast<int>(std::ceil(std::max(std::abs(x1 - x0), std::abs(y1 - y0)))));
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      img.set(static_cast<int>(std::lround(x0 + t * (x1 - x0))), static_cast<int>(std::lround(y0 + t * (y1 - y0))),
              0, 0, 200);
    }
  }
  if (curve.size() == 1) {
    const auto [x, y] = to_px(curve.front());
    img.set(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)), 0, 0, 200);
  }
  return img;
}

}  // namespace

std::vector<fs::path> render_matrices(const fs::path& report_path, const fs::path& out_dir) {
  const EvalReport report = load_report(report_path);
  const fs::path base = report_path.parent_path();
  auto file = [&](const std::string& role) {
    const auto it = report.files.find(role);
    if (it == report.files.end()) fail(ErrorCode::kFormat, fmt::format("report lacks file reference '{}'", role));
    return base / it->second;
  };
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) fail(ErrorCode::kIo, fmt::format("cannot create '{}'", out_dir.string()));

  std::vector<fs::path> written;
  auto emit = [&](const Image& img, const char* name) {
    write_png(img, out_dir / name);
    written.push_back(out_dir / name);
  };
  emit(grayscale(read_matrix(file("distance_matrix"))), "distance.png");
  emit(mask_image(read_mask(file("gt_matrix"))), "gt.png");
  emit(match_image(read_mask(file("match_precision_tp")), read_mask(file("match_precision_fp"))), "match_precision.png");
  emit(match_image(read_mask(file("match_n_tp")), read_mask(file("match_n_fp"))), "match_n.png");
  emit(curve_image(report.pr_curve), "pr_curve.png");
  return written;
}

}  // namespace radarpr
