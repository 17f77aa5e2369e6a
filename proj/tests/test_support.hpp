#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "footpath/raster.hpp"

namespace footpath::testing {

// Random blob mask with foreground fraction close to `density`: ellipses and
// rectangles are painted until the target is reached, then small holes are
// punched and isolated pixels sprinkled so that pinch points, one-pixel
// components and nested holes all occur.
inline BinaryMask random_blob_mask(std::mt19937_64& rng, double density, int width = 256, int height = 256) {
  BinaryMask m(width, height);
  const std::size_t target = static_cast<std::size_t>(density * width * height);
  std::uniform_int_distribution<int> cx(0, width - 1), cy(0, height - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = 4.0 + 40.0 * density;
  auto paint_ellipse = [&](int x0, int y0, double rx, double ry, bool v) {
    for (int y = std::max(0, int(y0 - ry)); y <= std::min(height - 1, int(y0 + ry)); ++y) {
      for (int x = std::max(0, int(x0 - rx)); x <= std::min(width - 1, int(x0 + rx)); ++x) {
        const double dx = (x - x0) / rx, dy = (y - y0) / ry;
        if (dx * dx + dy * dy <= 1.0) m.set(x, y, v);
      }
    }
  };
  std::size_t guard = 0;
  while (m.count() < target && ++guard < 10000) {
    const int x0 = cx(rng), y0 = cy(rng);
    const double rx = 1.0 + u(rng) * scale, ry = 1.0 + u(rng) * scale;
    if (u(rng) < 0.5) {
      paint_ellipse(x0, y0, rx, ry, true);
    } else {
      for (int y = y0; y < std::min(height, y0 + int(2 * ry)); ++y) {
        for (int x = x0; x < std::min(width, x0 + int(2 * rx)); ++x) m.set(x, y, true);
      }
    }
  }
  const int holes = 1 + static_cast<int>(u(rng) * 12);
  for (int i = 0; i < holes; ++i) paint_ellipse(cx(rng), cy(rng), 0.5 + u(rng) * 4, 0.5 + u(rng) * 4, false);
  const int specks = static_cast<int>(width * height * 0.002);
  for (int i = 0; i < specks; ++i) {
    const int x = cx(rng), y = cy(rng);
    m.set(x, y, !m.at(x, y));
  }
  return m;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("footpath_" + tag + "_" + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Copies the synthetic network and its config into dir; returns the config
// path. The config's relative directories then resolve inside dir.
inline std::filesystem::path copy_pipeline_fixture(const std::filesystem::path& dir) {
  const std::filesystem::path src = FOOTPATH_FIXTURES;
  for (const char* name : {"network.geojson", "pipeline.ini"}) {
    std::filesystem::copy_file(src / name, dir / name, std::filesystem::copy_options::overwrite_existing);
  }
  return dir / "pipeline.ini";
}

}  // namespace footpath::testing
