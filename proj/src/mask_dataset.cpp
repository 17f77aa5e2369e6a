#include "footpath/mask_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "footpath/errors.hpp"
#include "footpath/tile_tree.hpp"

namespace footpath {

namespace {

constexpr double kSliverArea = 1e-12;  // square degrees

struct Extent {
  double west, south, east, north;
};

Extent ring_extent(const Ring& r) {
  Extent e{r.front().lon, r.front().lat, r.front().lon, r.front().lat};
  for (const GeoPoint& p : r) {
    e.west = std::min(e.west, p.lon);
    e.east = std::max(e.east, p.lon);
    e.south = std::min(e.south, p.lat);
    e.north = std::max(e.north, p.lat);
  }
  return e;
}

enum class Side { kWest, kEast, kSouth, kNorth };

bool inside(const Point2& p, Side side, const BBox& b) {
  switch (side) {
    case Side::kWest: return p.x >= b.west;
    case Side::kEast: return p.x <= b.east;
    case Side::kSouth: return p.y >= b.south;
    case Side::kNorth: return p.y <= b.north;
  }
  return false;
}

Point2 intersect(const Point2& p, const Point2& q, Side side, const BBox& b) {
  switch (side) {
    case Side::kWest:
    case Side::kEast: {
      const double x = side == Side::kWest ? b.west : b.east;
      const double t = (x - p.x) / (q.x - p.x);
      return {x, p.y + t * (q.y - p.y)};
    }
    case Side::kSouth:
    case Side::kNorth: {
      const double y = side == Side::kSouth ? b.south : b.north;
      const double t = (y - p.y) / (q.y - p.y);
      return {p.x + t * (q.x - p.x), y};
    }
  }
  return p;
}

// Sutherland–Hodgman against one rectangle; input and output are open
// vertex lists (no closing duplicate).
std::vector<Point2> clip_ring(std::vector<Point2> pts, const BBox& b) {
  for (Side side : {Side::kWest, Side::kEast, Side::kSouth, Side::kNorth}) {
    if (pts.empty()) break;
    std::vector<Point2> out;
    out.reserve(pts.size() + 4);
    Point2 prev = pts.back();
    bool prev_in = inside(prev, side, b);
    for (const Point2& cur : pts) {
      const bool cur_in = inside(cur, side, b);
      if (cur_in) {
        if (!prev_in) out.push_back(intersect(prev, cur, side, b));
        out.push_back(cur);
      } else if (prev_in) {
        out.push_back(intersect(prev, cur, side, b));
      }
      prev = cur;
      prev_in = cur_in;
    }
    pts = std::move(out);
  }
  return pts;
}

std::vector<Point2> open_ring(const Ring& r) {
  std::vector<Point2> pts;
  pts.reserve(r.size());
  for (std::size_t i = 0; i + 1 < r.size(); ++i) pts.push_back(to_point2(r[i]));
  return pts;
}

Ring close_ring(const std::vector<Point2>& pts) {
  Ring r = to_geo_ring(pts);
  r.push_back(r.front());
  return r;
}

bool extent_inside(const Extent& e, const BBox& b) {
  return e.west >= b.west && e.east <= b.east && e.south >= b.south && e.north <= b.north;
}

bool extent_disjoint(const Extent& e, const BBox& b) {
  return e.east < b.west || e.west > b.east || e.north < b.south || e.south > b.north;
}

std::vector<GeoPolygon> clip_unchecked(const GeoPolygon& poly, const BBox& bbox) {
  const Extent ext = ring_extent(poly.exterior);
  if (extent_disjoint(ext, bbox)) return {};
  if (extent_inside(ext, bbox)) return {poly};

  const std::vector<Point2> outer = clip_ring(open_ring(poly.exterior), bbox);
  if (outer.size() < 3 || std::abs(signed_area(outer)) < kSliverArea) return {};

  GeoPolygon result;
  result.exterior = close_ring(outer);
  for (const Ring& h : poly.holes) {
    const std::vector<Point2> clipped = clip_ring(open_ring(h), bbox);
    if (clipped.size() < 3 || std::abs(signed_area(clipped)) < kSliverArea) continue;
    // Holes keep the parent exterior of the source polygon; a clipped hole
    // always lies within the clipped exterior since both are cut by the same box.
    result.holes.push_back(close_ring(clipped));
  }
  return {std::move(result)};
}

// Row range [first, last) whose center latitude lies in [lo, hi). Center
// latitudes decrease with the row index.
std::pair<int, int> rows_in_lat_range(const std::vector<double>& lat_c, double lo, double hi) {
  // First row with lat < hi.
  const auto first = std::partition_point(lat_c.begin(), lat_c.end(), [hi](double v) { return v >= hi; });
  // First row with lat < lo.
  const auto last = std::partition_point(first, lat_c.end(), [lo](double v) { return v >= lo; });
  return {static_cast<int>(first - lat_c.begin()), static_cast<int>(last - lat_c.begin())};
}

void fill_polygon(const GeoPolygon& poly, const std::vector<double>& lon_c, const std::vector<double>& lat_c,
                  std::vector<std::vector<double>>* crossings, BinaryMask* mask) {
  const int height = static_cast<int>(lat_c.size());
  const int width = static_cast<int>(lon_c.size());
  for (auto& row : *crossings) row.clear();

  int touched_lo = height;
  int touched_hi = 0;
  auto add_ring = [&](const Ring& ring) {
    const std::size_t n = is_closed(ring) ? ring.size() - 1 : ring.size();
    for (std::size_t i = 0, k = n - 1; i < n; k = i++) {
      const GeoPoint& a = ring[i];
      const GeoPoint& b = ring[k];
      if (a.lat == b.lat) continue;
      const auto [r0, r1] = rows_in_lat_range(lat_c, std::min(a.lat, b.lat), std::max(a.lat, b.lat));
      for (int r = r0; r < r1; ++r) {
        const double lat = lat_c[static_cast<std::size_t>(r)];
        // Same expression as the point-in-ring test so both agree bit for bit.
        const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
        (*crossings)[static_cast<std::size_t>(r)].push_back(x);
      }
      touched_lo = std::min(touched_lo, r0);
      touched_hi = std::max(touched_hi, r1);
    }
  };
  add_ring(poly.exterior);
  for (const Ring& h : poly.holes) add_ring(h);

  for (int r = touched_lo; r < touched_hi; ++r) {
    auto& xs = (*crossings)[static_cast<std::size_t>(r)];
    if (xs.empty()) continue;
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    std::size_t passed = 0;  // crossings with x <= current center
    for (int c = 0; c < width; ++c) {
      const double lon = lon_c[static_cast<std::size_t>(c)];
      while (passed < n && xs[passed] <= lon) ++passed;
      if (passed == n) break;
      if ((n - passed) % 2 == 1) mask->set(c, r, true);
    }
  }
}

std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

std::vector<GeoPolygon> clip_polygon_to_bbox(const GeoPolygon& poly, const BBox& bbox) {
  validate_polygon(poly);
  if (!(bbox.west <= bbox.east && bbox.south <= bbox.north)) throw DomainError("invalid clip box");
  return clip_unchecked(poly, bbox);
}

BinaryMask rasterize_window(std::span<const GeoPolygon> polys, int z, std::int64_t origin_x, std::int64_t origin_y,
                            int width, int height) {
  validate_zoom(z);
  BinaryMask mask(width, height);
  std::vector<double> lon_c(static_cast<std::size_t>(width));
  std::vector<double> lat_c(static_cast<std::size_t>(height));
  const double ox = static_cast<double>(origin_x);
  const double oy = static_cast<double>(origin_y);
  for (int c = 0; c < width; ++c) lon_c[static_cast<std::size_t>(c)] = unproject({ox + (c + 0.5), oy}, z).lon;
  for (int r = 0; r < height; ++r) lat_c[static_cast<std::size_t>(r)] = unproject({ox, oy + (r + 0.5)}, z).lat;

  const BBox window{lon_c.front(), lat_c.back(), lon_c.back(), lat_c.front()};
  std::vector<std::vector<double>> crossings(static_cast<std::size_t>(height));
  for (const GeoPolygon& poly : polys) {
    if (poly.exterior.size() < 4) continue;
    if (extent_disjoint(ring_extent(poly.exterior), window)) continue;
    fill_polygon(poly, lon_c, lat_c, &crossings, &mask);
  }
  return mask;
}

BinaryMask rasterize(std::span<const GeoPolygon> polys, const TileId& tile) {
  validate(tile);
  return rasterize_window(polys, tile.z, tile.x * kTileSize, tile.y * kTileSize, kTileSize, kTileSize);
}

std::size_t build_mask_dataset(const VectorNetwork& network, std::span<const TileId> tiles,
                               const std::filesystem::path& out_dir, const MaskBuildOptions& options) {
  if (tiles.empty()) return 0;
  const int z = tiles.front().z;
  for (const TileId& t : tiles) {
    validate(t);
    if (t.z != z) throw DomainError("build_mask_dataset: tiles span several zoom levels");
  }

  // Candidate polygons per requested tile, found from each polygon's extent.
  std::map<TileId, std::size_t> slot;
  for (std::size_t i = 0; i < tiles.size(); ++i) slot.emplace(tiles[i], i);
  std::vector<std::vector<std::size_t>> candidates(tiles.size());
  for (std::size_t p = 0; p < network.polygons.size(); ++p) {
    const Extent e = ring_extent(network.polygons[p].exterior);
    const GlobalPixel nw = project({std::min(e.north, kMaxLatitude), e.west}, z);
    const GlobalPixel se = project({std::max(e.south, -kMaxLatitude), e.east}, z);
    const auto x0 = static_cast<std::int64_t>(std::floor(nw.x / kTileSize));
    const auto x1 = static_cast<std::int64_t>(std::floor(se.x / kTileSize));
    const auto y0 = static_cast<std::int64_t>(std::floor(nw.y / kTileSize));
    const auto y1 = static_cast<std::int64_t>(std::floor(se.y / kTileSize));
    const auto span_tiles = static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
    if (span_tiles <= static_cast<double>(tiles.size())) {
      for (std::int64_t y = y0; y <= y1; ++y) {
        for (std::int64_t x = x0; x <= x1; ++x) {
          if (auto it = slot.find({x, y, z}); it != slot.end()) candidates[it->second].push_back(p);
        }
      }
    } else {
      for (std::size_t i = 0; i < tiles.size(); ++i) {
        if (tiles[i].x >= x0 && tiles[i].x <= x1 && tiles[i].y >= y0 && tiles[i].y <= y1) {
          candidates[i].push_back(p);
        }
      }
    }
  }

  std::mutex error_mutex;
  std::vector<std::string> errors;
  std::atomic<std::size_t> written{0};
  parallel_for(tiles.size(), options.threads, [&](std::size_t i) {
    const TileId& t = tiles[i];
    const BBox box = tile_to_bbox(t);
    std::vector<GeoPolygon> clipped;
    for (std::size_t p : candidates[i]) {
      for (GeoPolygon& piece : clip_unchecked(network.polygons[p], box)) clipped.push_back(std::move(piece));
    }
    try {
      write_mask(tile_path(out_dir, t), rasterize(clipped, t));
      written.fetch_add(1);
    } catch (const Error& e) {
      std::lock_guard lock(error_mutex);
      errors.push_back(to_string(t) + ": " + e.what());
    }
  });
  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    std::string msg = std::to_string(errors.size()) + " mask(s) failed to write; first: " + errors.front();
    throw IoError(msg);
  }
  return written.load();
}

DatasetSplit split_dataset(std::span<const TileId> tiles, std::uint64_t seed, std::size_t n_train,
                           std::size_t n_val) {
  if (n_train + n_val > tiles.size()) {
    throw DomainError("split needs " + std::to_string(n_train + n_val) + " tiles but only " +
                      std::to_string(tiles.size()) + " are available");
  }
  std::vector<TileId> order(tiles.begin(), tiles.end());
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw DomainError("split input contains duplicate tiles");
  }
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[bounded(rng, i)]);
  }
  DatasetSplit split;
  split.seed = seed;
  const auto train_end = order.begin() + static_cast<std::ptrdiff_t>(n_train);
  const auto val_end = train_end + static_cast<std::ptrdiff_t>(n_val);
  split.train.assign(order.begin(), train_end);
  split.val.assign(train_end, val_end);
  split.test.assign(val_end, order.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string format_split_manifest(const DatasetSplit& split) {
  std::string out;
  auto emit = [&out](const std::vector<TileId>& v, const char* name) {
    for (const TileId& t : v) {
      out += to_string(t);
      out += '\t';
      out += name;
      out += '\n';
    }
  };
  emit(split.train, "train");
  emit(split.val, "val");
  emit(split.test, "test");
  return out;
}

DatasetSplit parse_split_manifest(const std::string& text) {
  DatasetSplit split;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw DomainError("split manifest line " + std::to_string(lineno) + ": no tab");
    const TileId t = parse_tile_id(std::string_view(line).substr(0, tab));
    const std::string role = line.substr(tab + 1);
    if (role == "train") {
      split.train.push_back(t);
    } else if (role == "val") {
      split.val.push_back(t);
    } else if (role == "test") {
      split.test.push_back(t);
    } else {
      throw DomainError("split manifest line " + std::to_string(lineno) + ": unknown role '" + role + "'");
    }
  }
  return split;
}

}  // namespace footpath
