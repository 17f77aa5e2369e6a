#include "footpath/geo_tiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "footpath/errors.hpp"

namespace footpath {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double world_pixels(int z) { return static_cast<double>(tiles_per_axis(z)) * kTileSize; }

// Splits a global coordinate into (tile index, in-tile offset) with floor
// semantics, clamped so the offset always stays in [0, 256).
void split_axis(double g, std::int64_t n, std::int64_t* tile, double* offset) {
  const double world = static_cast<double>(n) * kTileSize;
  g = std::clamp(g, 0.0, std::nextafter(world, 0.0));
  auto idx = static_cast<std::int64_t>(std::floor(g / kTileSize));
  idx = std::clamp<std::int64_t>(idx, 0, n - 1);
  double off = g - static_cast<double>(idx * kTileSize);
  if (off >= kTileSize) off = std::nextafter(static_cast<double>(kTileSize), 0.0);
  if (off < 0.0) off = 0.0;
  *tile = idx;
  *offset = off;
}

}  // namespace

std::int64_t tiles_per_axis(int z) { return std::int64_t{1} << z; }

bool is_valid(const TileId& t) noexcept {
  if (t.z < 0 || t.z > kMaxZoom) return false;
  const std::int64_t n = std::int64_t{1} << t.z;
  return t.x >= 0 && t.x < n && t.y >= 0 && t.y < n;
}

void validate(const TileId& t) {
  if (!is_valid(t)) throw DomainError("invalid tile " + to_string(t));
}

void validate_zoom(int z) {
  if (z < 0 || z > kMaxZoom) throw DomainError("zoom " + std::to_string(z) + " outside [0, 23]");
}

void validate(const GeoPoint& p) {
  if (!(p.lat >= -kMaxLatitude && p.lat <= kMaxLatitude)) {
    throw DomainError("latitude " + std::to_string(p.lat) + " outside the Web-Mercator range");
  }
  if (!(p.lon >= -180.0 && p.lon < 180.0)) {
    throw DomainError("longitude " + std::to_string(p.lon) + " outside [-180, 180)");
  }
}

void validate(const BBox& b) {
  const bool lon_ok = b.west >= -180.0 && b.east <= 180.0 && b.west <= b.east && b.west < 180.0;
  const bool lat_ok = b.south >= -kMaxLatitude && b.north <= kMaxLatitude && b.south <= b.north;
  if (!lon_ok || !lat_ok) throw DomainError("invalid bounding box");
}

GlobalPixel project(const GeoPoint& p, int z) {
  const double world = world_pixels(z);
  const double lat = p.lat * kDegToRad;
  const double x = (p.lon + 180.0) / 360.0 * world;
  const double y = (1.0 - std::log(std::tan(lat) + 1.0 / std::cos(lat)) / std::numbers::pi) / 2.0 * world;
  return {x, y};
}

GeoPoint unproject(const GlobalPixel& g, int z) {
  const double world = world_pixels(z);
  const double lon = g.x / world * 360.0 - 180.0;
  const double lat = std::atan(std::sinh(std::numbers::pi * (1.0 - 2.0 * g.y / world))) * kRadToDeg;
  return {lat, lon};
}

TileId latlon_to_tile(const GeoPoint& p, int z) {
  return latlon_to_pixel(p, z).tile;
}

PixelCoord latlon_to_pixel(const GeoPoint& p, int z) {
  validate_zoom(z);
  validate(p);
  const GlobalPixel g = project(p, z);
  const std::int64_t n = tiles_per_axis(z);
  PixelCoord pc;
  pc.tile.z = z;
  split_axis(g.x, n, &pc.tile.x, &pc.px);
  split_axis(g.y, n, &pc.tile.y, &pc.py);
  return pc;
}

GeoPoint pixel_to_latlon(const PixelCoord& pc) {
  validate(pc.tile);
  if (!(pc.px >= 0.0 && pc.px < kTileSize && pc.py >= 0.0 && pc.py < kTileSize)) {
    throw DomainError("pixel offset outside [0, 256)");
  }
  const GlobalPixel origin = tile_origin(pc.tile);
  return unproject({origin.x + pc.px, origin.y + pc.py}, pc.tile.z);
}

BBox tile_to_bbox(const TileId& t) {
  validate(t);
  const GlobalPixel nw = tile_origin(t);
  const GeoPoint a = unproject(nw, t.z);
  const GeoPoint b = unproject({nw.x + kTileSize, nw.y + kTileSize}, t.z);
  return {a.lon, b.lat, b.lon, a.lat};
}

double ground_resolution(double lat_deg, int z) {
  validate_zoom(z);
  if (!(std::abs(lat_deg) <= kMaxLatitude)) throw DomainError("latitude outside the Web-Mercator range");
  return kEquatorialResolution * std::cos(lat_deg * kDegToRad) / static_cast<double>(tiles_per_axis(z));
}

std::vector<TileId> tiles_in_bbox(const BBox& b, int z) {
  validate_zoom(z);
  validate(b);
  const std::int64_t n = tiles_per_axis(z);
  // Project the NW and SE corners; north maps to the smaller row.
  const GlobalPixel nw = project({b.north, b.west}, z);
  const GlobalPixel se = project({b.south, b.east}, z);
  auto first = [n](double g) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(g / kTileSize)), 0, n - 1);
  };
  auto last = [n](double g) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(g / kTileSize)) - 1, 0, n - 1);
  };
  const std::int64_t x0 = first(nw.x);
  const std::int64_t y0 = first(nw.y);
  const std::int64_t x1 = b.east > b.west ? std::max(x0, last(se.x)) : x0;
  const std::int64_t y1 = b.north > b.south ? std::max(y0, last(se.y)) : y0;

  std::vector<TileId> out;
  out.reserve(static_cast<std::size_t>((x1 - x0 + 1) * (y1 - y0 + 1)));
  for (std::int64_t y = y0; y <= y1; ++y) {
    for (std::int64_t x = x0; x <= x1; ++x) out.push_back({x, y, z});
  }
  return out;
}

std::string to_string(const TileId& t) {
  return std::to_string(t.z) + "/" + std::to_string(t.x) + "/" + std::to_string(t.y);
}

TileId parse_tile_id(std::string_view zxy) {
  TileId t;
  const char* p = zxy.data();
  const char* end = zxy.data() + zxy.size();
  auto read = [&](auto& v, bool need_slash) {
    auto [ptr, ec] = std::from_chars(p, end, v);
    if (ec != std::errc{} || ptr == p) throw DomainError("malformed tile id '" + std::string(zxy) + "'");
    p = ptr;
    if (need_slash) {
      if (p == end || *p != '/') throw DomainError("malformed tile id '" + std::string(zxy) + "'");
      ++p;
    }
  };
  read(t.z, true);
  read(t.x, true);
  read(t.y, false);
  if (p != end) throw DomainError("malformed tile id '" + std::string(zxy) + "'");
  validate(t);
  return t;
}

}  // namespace footpath
