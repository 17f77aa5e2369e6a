#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "footpath/geo_tiles.hpp"
#include "footpath/parallel.hpp"
#include "footpath/tile_client.hpp"

namespace footpath {

// Run configuration. Paths are absolute once loaded; an empty path means the
// setting was not given and the stages that need it are unavailable.
struct PipelineConfig {
  TileSource tile_source;
  std::optional<BBox> region;
  int zoom = 21;

  std::filesystem::path cache_dir;
  std::filesystem::path masks_gt_dir;
  std::filesystem::path masks_pred_dir;
  std::filesystem::path out_dir;
  std::filesystem::path network;

  double tol_px = 1.0;

  std::uint64_t seed = 0;
  std::size_t n_train = 1000;
  std::size_t n_val = 200;
  // Ground-truth tiles with fewer foreground pixels are left out of the split.
  std::size_t min_foreground = 0;

  bool per_image_csv = false;
  int threads = default_thread_count();
};

// "section.key" = value pairs applied on top of the file, in order.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

// INI text. Relative paths resolve against base_dir. The token comes from
// tile_source.auth_token, then env_token, then the overrides (last wins).
// Unknown keys and invalid values raise ConfigError.
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                            const ConfigOverrides& overrides = {}, const char* env_token = nullptr);

// Reads the file and FOOTPATH_TILE_KEY from the environment.
PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

// Zoom in range, tol_px >= 0, configured directories pairwise distinct.
void validate(const PipelineConfig& cfg);

// Effective configuration as INI text, auth token redacted. Parsing it back
// yields the same configuration apart from the token.
std::string format_config(const PipelineConfig& cfg);

}  // namespace footpath
