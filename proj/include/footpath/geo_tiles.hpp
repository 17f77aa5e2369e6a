#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace footpath {

inline constexpr int kTileSize = 256;
inline constexpr int kMaxZoom = 23;
inline constexpr double kMaxLatitude = 85.05112878;
inline constexpr double kEquatorialResolution = 156543.03392;  // m/px at z=0

// Slippy-map tile address. Ordered by (z, y, x), i.e. row-major within a zoom.
struct TileId {
  std::int64_t x = 0;
  std::int64_t y = 0;
  int z = 0;

  friend bool operator==(const TileId&, const TileId&) = default;
  friend std::strong_ordering operator<=>(const TileId& a, const TileId& b) {
    if (auto c = a.z <=> b.z; c != 0) return c;
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;
};

// Fractional pixel position inside one tile, px/py in [0, 256).
struct PixelCoord {
  TileId tile;
  double px = 0.0;
  double py = 0.0;
};

// Position on the global pixel plane of a zoom level: [0, 256·2^z] on both axes.
struct GlobalPixel {
  double x = 0.0;
  double y = 0.0;
};

struct BBox {
  double west = 0.0;
  double south = 0.0;
  double east = 0.0;
  double north = 0.0;

  bool contains(const GeoPoint& p) const {
    return p.lon >= west && p.lon <= east && p.lat >= south && p.lat <= north;
  }
};

bool is_valid(const TileId& t) noexcept;
void validate(const TileId& t);
void validate_zoom(int z);
void validate(const GeoPoint& p);
// Bounding boxes may be degenerate (a point) and may reach lon = +180 on the east edge.
void validate(const BBox& b);

std::int64_t tiles_per_axis(int z);

TileId latlon_to_tile(const GeoPoint& p, int z);
BBox tile_to_bbox(const TileId& t);
GeoPoint pixel_to_latlon(const PixelCoord& pc);
PixelCoord latlon_to_pixel(const GeoPoint& p, int z);
double ground_resolution(double lat_deg, int z);

// Unclamped forward/inverse Mercator on the global pixel plane. These are the
// primitives the per-tile functions are built on; tile corners (x+1, y+1) and
// lattice points on the far edge of the world are representable here.
GlobalPixel project(const GeoPoint& p, int z);
GeoPoint unproject(const GlobalPixel& g, int z);

inline GlobalPixel tile_origin(const TileId& t) {
  return {static_cast<double>(t.x * kTileSize), static_cast<double>(t.y * kTileSize)};
}

// All tiles at zoom z whose footprint overlaps the box, sorted row-major.
// A degenerate axis selects the single tile that owns that coordinate.
std::vector<TileId> tiles_in_bbox(const BBox& b, int z);

std::string to_string(const TileId& t);  // "z/x/y"
TileId parse_tile_id(std::string_view zxy);

}  // namespace footpath
