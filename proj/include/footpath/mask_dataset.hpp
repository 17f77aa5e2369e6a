#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "footpath/geo_tiles.hpp"
#include "footpath/geometry.hpp"
#include "footpath/parallel.hpp"
#include "footpath/raster.hpp"

namespace footpath {

// Polygonal footpath layer in EPSG:4326, rings validated and oriented.
struct VectorNetwork {
  std::vector<GeoPolygon> polygons;
};

// Clips each ring against the box (Sutherland–Hodgman), re-attaches holes to
// the clipped exterior and drops slivers under 1e-12 square degrees. A
// polygon entirely inside the box is returned unchanged.
std::vector<GeoPolygon> clip_polygon_to_bbox(const GeoPolygon& poly, const BBox& bbox);

// Pixel-center, even-odd rasterization of polygons over an arbitrary window
// of the global pixel plane at zoom z. Each polygon is filled with its own
// parity; the result is the union.
BinaryMask rasterize_window(std::span<const GeoPolygon> polys, int z, std::int64_t origin_x, std::int64_t origin_y,
                            int width, int height);

BinaryMask rasterize(std::span<const GeoPolygon> polys, const TileId& tile);

struct MaskBuildOptions {
  int threads = default_thread_count();
};

// Writes {out_dir}/{z}/{x}/{y}.png for every tile. Per-file failures are
// collected; after every tile has been attempted they are rethrown as one
// IoError. Returns the number of masks written.
std::size_t build_mask_dataset(const VectorNetwork& network, std::span<const TileId> tiles,
                               const std::filesystem::path& out_dir, const MaskBuildOptions& options = {});

struct DatasetSplit {
  std::vector<TileId> train;
  std::vector<TileId> val;
  std::vector<TileId> test;
  std::uint64_t seed = 0;
};

// Deterministic for a given seed and tile set (input order does not matter).
DatasetSplit split_dataset(std::span<const TileId> tiles, std::uint64_t seed, std::size_t n_train,
                           std::size_t n_val);

// "z/x/y<TAB>train|val|test" per line, in split order train, val, test.
std::string format_split_manifest(const DatasetSplit& split);
DatasetSplit parse_split_manifest(const std::string& text);

}  // namespace footpath
