#include "footpath/network_assembler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "footpath/errors.hpp"
#include "footpath/geojson.hpp"
#include "footpath/raster.hpp"
#include "footpath/vectorizer.hpp"

namespace footpath {

namespace {

using LatticeRing = std::vector<LatticePoint>;

std::uint64_t pack(const LatticePoint& p) {
  return (static_cast<std::uint64_t>(p.y) << 32) | static_cast<std::uint64_t>(p.x);
}

struct Edge {
  LatticePoint from;
  LatticePoint to;
};

struct EdgeKey {
  std::uint64_t from;
  std::uint64_t to;
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const noexcept {
    std::uint64_t h = k.from * 0x9E3779B97F4A7C15ull;
    h ^= k.to + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

EdgeKey key_of(const Edge& e) { return {pack(e.from), pack(e.to)}; }
EdgeKey reverse_key(const Edge& e) { return {pack(e.to), pack(e.from)}; }

LatticeRing snap_ring(const Ring& ring, int z) {
  LatticeRing out;
  out.reserve(ring.size());
  for (const GeoPoint& p : ring) {
    const GlobalPixel g = project(p, z);
    if (!std::isfinite(g.x) || !std::isfinite(g.y)) throw GeometryError("vertex outside the projection");
    // Rounding moves each axis by at most half a pixel.
    out.push_back({std::llround(g.x), std::llround(g.y)});
  }
  if (out.size() < 2 || !(out.front() == out.back())) throw GeometryError("ring is not closed");
  return out;
}

// Axis-aligned segments are split into unit edges so shared stretches of
// unequal length still cancel; other lattice segments stay whole.
void emit_edges(const LatticeRing& ring, std::vector<Edge>* out) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const LatticePoint a = ring[i];
    const LatticePoint b = ring[i + 1];
    if (a == b) continue;
    if (a.x == b.x || a.y == b.y) {
      const std::int64_t sx = (b.x > a.x) - (b.x < a.x);
      const std::int64_t sy = (b.y > a.y) - (b.y < a.y);
      LatticePoint p = a;
      while (!(p == b)) {
        const LatticePoint q{p.x + sx, p.y + sy};
        out->push_back({p, q});
        p = q;
      }
    } else {
      out->push_back({a, b});
    }
  }
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Turn angle seen on screen (rows grow downwards): negative is a right turn.
double screen_turn(const Edge& in, const Edge& out) {
  const double ix = static_cast<double>(in.to.x - in.from.x);
  const double iy = static_cast<double>(in.to.y - in.from.y);
  const double ox = static_cast<double>(out.to.x - out.from.x);
  const double oy = static_cast<double>(out.to.y - out.from.y);
  const double cross = ix * oy - iy * ox;
  const double dot = ix * ox + iy * oy;
  return std::atan2(-cross, dot);
}

LatticeRing reduce_and_rotate(const LatticeRing& open) {
  const std::size_t n = open.size();
  LatticeRing corners;
  for (std::size_t i = 0; i < n; ++i) {
    const LatticePoint& prev = open[(i + n - 1) % n];
    const LatticePoint& cur = open[i];
    const LatticePoint& next = open[(i + 1) % n];
    const std::int64_t cross = (cur.x - prev.x) * (next.y - cur.y) - (cur.y - prev.y) * (next.x - cur.x);
    const std::int64_t dot = (cur.x - prev.x) * (next.x - cur.x) + (cur.y - prev.y) * (next.y - cur.y);
    if (cross != 0 || dot <= 0) corners.push_back(cur);
  }
  if (corners.empty()) return {};
  const auto first = std::min_element(corners.begin(), corners.end());
  std::rotate(corners.begin(), first, corners.end());
  corners.push_back(corners.front());
  return corners;
}

std::int64_t area2(const LatticeRing& ring) {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    sum += (ring[i].x - ring[0].x) * (ring[i + 1].y - ring[0].y) - (ring[i + 1].x - ring[0].x) * (ring[i].y - ring[0].y);
  }
  return sum;
}

// Chains boundary edges into closed rings, taking the sharpest right turn at
// vertices with several exits (the same choice the contour tracer makes).
std::vector<LatticeRing> chain_rings(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return a.from < b.from;
    return a.to < b.to;
  });
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> outgoing;
  for (std::size_t i = 0; i < edges.size(); ++i) outgoing[pack(edges[i].from)].push_back(i);
  std::vector<char> used(edges.size(), 0);

  std::vector<LatticeRing> rings;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (used[start]) continue;
    LatticeRing path;
    std::size_t cur = start;
    for (;;) {
      used[cur] = 1;
      path.push_back(edges[cur].from);
      const auto it = outgoing.find(pack(edges[cur].to));
      if (it == outgoing.end()) throw GeometryError("dissolve produced an open boundary");
      std::size_t best = edges.size();
      double best_turn = 0.0;
      for (std::size_t cand : it->second) {
        if (used[cand] && cand != start) continue;
        const double t = screen_turn(edges[cur], edges[cand]);
        if (best == edges.size() || t < best_turn) {
          best = cand;
          best_turn = t;
        }
      }
      if (best == edges.size()) throw GeometryError("dissolve produced an open boundary");
      if (best == start) break;
      cur = best;
    }
    LatticeRing ring = reduce_and_rotate(path);
    if (ring.size() >= 4) rings.push_back(std::move(ring));
  }
  return rings;
}

bool lattice_point_in_ring(double px, double py, const LatticeRing& ring) {
  std::vector<Point2> pts;
  pts.reserve(ring.size());
  for (const LatticePoint& p : ring) pts.push_back({static_cast<double>(p.x), static_cast<double>(p.y)});
  return point_in_ring({px, py}, pts);
}

// Outer rings (negative screen area) each collect the holes they enclose.
std::vector<GeoPolygon> assemble_polygons(const std::vector<LatticeRing>& rings, int z) {
  std::vector<std::size_t> outers;
  std::vector<std::size_t> holes;
  for (std::size_t i = 0; i < rings.size(); ++i) (area2(rings[i]) < 0 ? outers : holes).push_back(i);
  std::sort(outers.begin(), outers.end(), [&](std::size_t a, std::size_t b) { return rings[a][0] < rings[b][0]; });

  std::vector<GeoPolygon> polys(outers.size());
  for (std::size_t k = 0; k < outers.size(); ++k) polys[k].exterior = lattice_to_geo(rings[outers[k]], z, 0, 0);
  for (std::size_t h : holes) {
    std::size_t owner = 0;
    if (outers.size() != 1) {
      // Probe a point just inside the hole, to the right of its first edge.
      const LatticePoint a = rings[h][0];
      const LatticePoint b = rings[h][1];
      const double dx = static_cast<double>(b.x - a.x);
      const double dy = static_cast<double>(b.y - a.y);
      const double len = std::hypot(dx, dy);
      const double px = (a.x + b.x) / 2.0 - 0.25 * dy / len;
      const double py = (a.y + b.y) / 2.0 + 0.25 * dx / len;
      std::int64_t best_area = 0;
      bool found = false;
      for (std::size_t k = 0; k < outers.size(); ++k) {
        if (!lattice_point_in_ring(px, py, rings[outers[k]])) continue;
        const std::int64_t a2 = -area2(rings[outers[k]]);
        if (!found || a2 < best_area) {
          owner = k;
          best_area = a2;
          found = true;
        }
      }
      if (!found) throw GeometryError("dissolve produced a hole outside every exterior");
    }
    polys[owner].holes.push_back(lattice_to_geo(rings[h], z, 0, 0));
  }
  return polys;
}

struct Group {
  std::vector<GeoPolygon> polygons;
  std::vector<TileId> tiles;
};

std::vector<Group> dissolve_groups(std::span<const TaggedPolygon> input, int z) {
  validate_zoom(z);
  const std::size_t n = input.size();
  std::vector<std::vector<Edge>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    emit_edges(snap_ring(input[i].polygon.exterior, z), &edges[i]);
    for (const Ring& h : input[i].polygon.holes) emit_edges(snap_ring(h, z), &edges[i]);
  }

  std::unordered_map<EdgeKey, std::size_t, EdgeKeyHash> owner;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : edges[i]) {
      if (!owner.emplace(key_of(e), i).second) throw GeometryError("overlapping polygons share a directed edge");
    }
  }
  UnionFind uf(n);
  std::vector<char> cancelled(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Edge& e : edges[i]) {
      if (auto it = owner.find(reverse_key(e)); it != owner.end()) {
        uf.unite(i, it->second);
        cancelled[i] = 1;
      }
    }
  }

  std::vector<std::vector<std::size_t>> members(n);
  for (std::size_t i = 0; i < n; ++i) members[uf.find(i)].push_back(i);

  std::vector<Group> groups;
  for (std::size_t root = 0; root < n; ++root) {
    const auto& m = members[root];
    if (m.empty()) continue;
    Group g;
    for (std::size_t i : m) g.tiles.push_back(input[i].tile);
    std::sort(g.tiles.begin(), g.tiles.end());
    g.tiles.erase(std::unique(g.tiles.begin(), g.tiles.end()), g.tiles.end());
    if (m.size() == 1 && !cancelled[m[0]]) {
      g.polygons.push_back(input[m[0]].polygon);
    } else {
      std::vector<Edge> boundary;
      for (std::size_t i : m) {
        for (const Edge& e : edges[i]) {
          if (!owner.contains(reverse_key(e))) boundary.push_back(e);
        }
      }
      g.polygons = assemble_polygons(chain_rings(std::move(boundary)), z);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

GlobalPixel northwest_corner(const GeoPolygon& p, int z) {
  GlobalPixel best{0.0, 0.0};
  bool first = true;
  for (const GeoPoint& q : p.exterior) {
    const GlobalPixel g = project(q, z);
    const GlobalPixel r{std::round(g.x), std::round(g.y)};
    if (first || r.y < best.y || (r.y == best.y && r.x < best.x)) best = r;
    first = false;
  }
  return best;
}

}  // namespace

double polygon_area_m2(const GeoPolygon& poly, int z) {
  auto pixel_ring = [z](const Ring& r) {
    PointRing pts;
    pts.reserve(r.size());
    for (const GeoPoint& p : r) {
      const GlobalPixel g = project(p, z);
      pts.push_back({g.x, g.y});
    }
    return pts;
  };
  const PointRing ext = pixel_ring(poly.exterior);
  double area_px = std::abs(signed_area(ext));
  for (const Ring& h : poly.holes) area_px -= std::abs(signed_area(pixel_ring(h)));

  // Area-weighted centroid of the exterior, relative to its first vertex.
  double cx = 0.0;
  double cy = 0.0;
  double a6 = 0.0;
  const Point2 o = ext.front();
  for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
    const double x0 = ext[i].x - o.x;
    const double y0 = ext[i].y - o.y;
    const double x1 = ext[i + 1].x - o.x;
    const double y1 = ext[i + 1].y - o.y;
    const double c = x0 * y1 - x1 * y0;
    cx += (x0 + x1) * c;
    cy += (y0 + y1) * c;
    a6 += 3.0 * c;
  }
  const double centroid_y = a6 != 0.0 ? o.y + cy / a6 : o.y;
  const double lat = unproject({o.x, centroid_y}, z).lat;
  const double res = ground_resolution(lat, z);
  return area_px * res * res;
}

std::vector<GeoPolygon> dissolve(std::span<const GeoPolygon> polys, int zoom) {
  std::vector<TaggedPolygon> tagged;
  tagged.reserve(polys.size());
  for (const GeoPolygon& p : polys) tagged.push_back({p, TileId{0, 0, 0}});
  std::vector<GeoPolygon> out;
  for (Group& g : dissolve_groups(tagged, zoom)) {
    for (GeoPolygon& p : g.polygons) out.push_back(std::move(p));
  }
  return out;
}

FeatureCollection dissolve_features(std::span<const TaggedPolygon> polys, int zoom, double tol_px) {
  if (!(tol_px >= 0.0)) throw DomainError("simplification tolerance must be non-negative");
  struct Keyed {
    Feature feature;
    TileId first_tile;
    GlobalPixel corner;
  };
  std::vector<Keyed> keyed;
  for (Group& g : dissolve_groups(polys, zoom)) {
    for (GeoPolygon& p : g.polygons) {
      Keyed k;
      k.corner = northwest_corner(p, zoom);
      k.feature.geometry = tol_px > 0.0 ? simplify_polygon(p, tol_px, zoom) : std::move(p);
      k.feature.tiles = g.tiles;
      k.feature.area_m2 = polygon_area_m2(k.feature.geometry, zoom);
      k.first_tile = g.tiles.front();
      keyed.push_back(std::move(k));
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.first_tile != b.first_tile) return a.first_tile < b.first_tile;
    if (a.corner.y != b.corner.y) return a.corner.y < b.corner.y;
    return a.corner.x < b.corner.x;
  });
  FeatureCollection fc;
  fc.features.reserve(keyed.size());
  for (Keyed& k : keyed) fc.features.push_back(std::move(k.feature));
  return fc;
}

FeatureCollection merge_tiles(const std::map<TileId, std::vector<GeoPolygon>>& per_tile, double tol_px) {
  if (per_tile.empty()) return {};
  const int z = per_tile.begin()->first.z;
  std::vector<TaggedPolygon> tagged;
  for (const auto& [tile, polys] : per_tile) {
    validate(tile);
    if (tile.z != z) throw DomainError("merge_tiles: tiles span several zoom levels");
    for (const GeoPolygon& p : polys) tagged.push_back({p, tile});
  }
  return dissolve_features(tagged, z, tol_px);
}

namespace {

void append_ring(const Ring& ring, std::string* out) {
  out->push_back('[');
  for (std::size_t i = 0; i < ring.size(); ++i) {
    if (i) out->push_back(',');
    out->push_back('[');
    *out += format_fixed(ring[i].lon, 9);
    out->push_back(',');
    *out += format_fixed(ring[i].lat, 9);
    out->push_back(']');
  }
  out->push_back(']');
}

void append_feature(const Feature& f, std::string* out) {
  *out += R"({"type":"Feature","properties":{"tiles":[)";
  for (std::size_t i = 0; i < f.tiles.size(); ++i) {
    if (i) out->push_back(',');
    *out += '"' + to_string(f.tiles[i]) + '"';
  }
  *out += R"(],"area_m2":)";
  *out += format_fixed(f.area_m2, 4);
  *out += R"(},"geometry":{"type":"Polygon","coordinates":[)";
  append_ring(f.geometry.exterior, out);
  for (const Ring& h : f.geometry.holes) {
    out->push_back(',');
    append_ring(h, out);
  }
  *out += "]}}";
}

}  // namespace

std::string format_geojson(const FeatureCollection& fc, GeoJsonLayout layout) {
  std::string out;
  if (layout == GeoJsonLayout::kFeaturePerLine) {
    for (const Feature& f : fc.features) {
      append_feature(f, &out);
      out.push_back('\n');
    }
    return out;
  }
  if (fc.features.empty()) return "{\"type\":\"FeatureCollection\",\"features\":[]}\n";
  out = "{\"type\":\"FeatureCollection\",\"features\":[\n";
  for (std::size_t i = 0; i < fc.features.size(); ++i) {
    append_feature(fc.features[i], &out);
    out += i + 1 < fc.features.size() ? ",\n" : "\n";
  }
  out += "]}\n";
  return out;
}

std::size_t write_geojson(const FeatureCollection& fc, const std::filesystem::path& path, GeoJsonLayout layout) {
  const std::string text = format_geojson(fc, layout);
  atomic_write(path, text);
  return text.size();
}

}  // namespace footpath
