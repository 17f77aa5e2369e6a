#include "footpath/vectorizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "footpath/errors.hpp"

namespace footpath {

namespace {

// Directions in image coordinates; (d + 1) % 4 is a right turn on screen.
enum Dir : int { kEast = 0, kSouth = 1, kWest = 2, kNorth = 3 };
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

// Foreground pixel lying on the left of an edge leaving (x, y) in direction d.
std::pair<int, int> pixel_left_of(int x, int y, int d) {
  switch (d) {
    case kEast: return {x, y - 1};
    case kSouth: return {x, y};
    case kWest: return {x - 1, y};
    default: return {x - 1, y - 1};
  }
}

// 8-connected foreground labels, -1 for background.
std::vector<int> label_foreground(const BinaryMask& mask, int* count) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<int> label(static_cast<std::size_t>(w) * h, -1);
  std::vector<std::pair<int, int>> stack;
  int next = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(c, r) || label[static_cast<std::size_t>(r) * w + c] >= 0) continue;
      label[static_cast<std::size_t>(r) * w + c] = next;
      stack.push_back({c, r});
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (!mask.at_or_false(nx, ny)) continue;
            int& l = label[static_cast<std::size_t>(ny) * w + nx];
            if (l < 0) {
              l = next;
              stack.push_back({nx, ny});
            }
          }
        }
      }
      ++next;
    }
  }
  *count = next;
  return label;
}

// Drops vertices whose neighbours are collinear with them (cyclically) and
// rotates the ring so it starts at a corner; returns a closed ring.
std::vector<LatticePoint> corners_only(const std::vector<LatticePoint>& open) {
  const std::size_t n = open.size();
  std::vector<LatticePoint> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const LatticePoint& prev = open[(i + n - 1) % n];
    const LatticePoint& cur = open[i];
    const LatticePoint& next = open[(i + 1) % n];
    const std::int64_t cross = (cur.x - prev.x) * (next.y - cur.y) - (cur.y - prev.y) * (next.x - cur.x);
    if (cross != 0) out.push_back(cur);
  }
  out.push_back(out.front());
  return out;
}

std::int64_t lattice_area2(const std::vector<LatticePoint>& ring) {
  std::int64_t sum = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    sum += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return sum;
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

// Marks the vertices of pts[first..last] Douglas–Peucker keeps at tolerance tol.
void douglas_peucker(const std::vector<Point2>& pts, std::size_t first, std::size_t last, double tol,
                     std::vector<char>* keep) {
  std::vector<std::pair<std::size_t, std::size_t>> stack{{first, last}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    if (b <= a + 1) continue;
    double worst = -1.0;
    std::size_t idx = a;
    for (std::size_t i = a + 1; i < b; ++i) {
      const double d = point_segment_distance(pts[i], pts[a], pts[b]);
      if (d > worst) {
        worst = d;
        idx = i;
      }
    }
    if (worst > tol) {
      (*keep)[idx] = 1;
      stack.push_back({a, idx});
      stack.push_back({idx, b});
    }
  }
}

constexpr double kCollinearEps = 1e-9;  // pixels

// Indices (into an open ring) of vertices that are neither repeated nor collinear.
std::vector<std::size_t> non_collinear(const std::vector<Point2>& pts) {
  auto collinear = [&](std::size_t a, std::size_t m, std::size_t b) {
    return point_segment_distance(pts[m], pts[a], pts[b]) <= kCollinearEps;
  };
  std::vector<std::size_t> idx;
  idx.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!idx.empty() && pts[idx.back()] == pts[i]) continue;
    while (idx.size() >= 2 && collinear(idx[idx.size() - 2], idx.back(), i)) idx.pop_back();
    idx.push_back(i);
  }
  while (idx.size() > 1 && pts[idx.front()] == pts[idx.back()]) idx.pop_back();
  // Close the seam: the last and first vertices may still be collinear.
  std::size_t head = 0;
  for (bool changed = true; changed && idx.size() - head >= 3;) {
    changed = false;
    if (collinear(idx[idx.size() - 2], idx.back(), idx[head])) {
      idx.pop_back();
      changed = true;
    } else if (collinear(idx.back(), idx[head], idx[head + 1])) {
      ++head;
      changed = true;
    }
  }
  return {idx.begin() + static_cast<std::ptrdiff_t>(head), idx.end()};
}

Ring pick(const Ring& ring, const std::vector<std::size_t>& idx) {
  Ring out;
  out.reserve(idx.size() + 1);
  for (std::size_t i : idx) out.push_back(ring[i]);
  out.push_back(out.front());
  return out;
}

}  // namespace

std::vector<PixelContour> extract_contours(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  const int vw = w + 1;
  auto vid = [vw](int x, int y) { return static_cast<std::size_t>(y) * vw + x; };

  std::vector<std::uint8_t> out_bits(static_cast<std::size_t>(vw) * (h + 1), 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(c, r)) continue;
      if (!mask.at_or_false(c, r - 1)) out_bits[vid(c + 1, r)] |= 1 << kWest;
      if (!mask.at_or_false(c - 1, r)) out_bits[vid(c, r)] |= 1 << kSouth;
      if (!mask.at_or_false(c, r + 1)) out_bits[vid(c, r + 1)] |= 1 << kEast;
      if (!mask.at_or_false(c + 1, r)) out_bits[vid(c + 1, r + 1)] |= 1 << kNorth;
    }
  }

  int n_components = 0;
  const std::vector<int> label = label_foreground(mask, &n_components);
  std::vector<std::uint8_t> used(out_bits.size(), 0);
  std::vector<PixelContour> contours;
  std::vector<int> component_of;
  std::vector<LatticePoint> path;

  for (int y = 0; y <= h; ++y) {
    for (int x = 0; x <= w; ++x) {
      const std::size_t v0 = vid(x, y);
      for (int d0 = 0; d0 < 4; ++d0) {
        const std::uint8_t bit = static_cast<std::uint8_t>(1 << d0);
        if (!(out_bits[v0] & bit) || (used[v0] & bit)) continue;

        path.clear();
        int cx = x;
        int cy = y;
        int d = d0;
        for (;;) {
          used[vid(cx, cy)] |= static_cast<std::uint8_t>(1 << d);
          path.push_back({cx, cy});
          cx += kDx[d];
          cy += kDy[d];
          const std::uint8_t bits = out_bits[vid(cx, cy)];
          int next = -1;
          if (std::popcount(bits) == 1) {
            next = std::countr_zero(bits);
          } else {
            // Two ways out: turning right keeps diagonal foreground joined.
            const int right = (d + 1) % 4;
            next = (bits & (1 << right)) ? right : (d + 3) % 4;
          }
          if (cx == x && cy == y && next == d0) break;
          d = next;
        }

        PixelContour contour;
        contour.ring = corners_only(path);
        contour.kind = lattice_area2(contour.ring) < 0 ? ContourKind::kOuter : ContourKind::kHole;
        const auto [px, py] = pixel_left_of(x, y, d0);
        component_of.push_back(label[static_cast<std::size_t>(py) * w + px]);
        contours.push_back(std::move(contour));
      }
    }
  }

  std::vector<std::optional<std::size_t>> outer_of(static_cast<std::size_t>(n_components));
  for (std::size_t i = 0; i < contours.size(); ++i) {
    if (contours[i].kind == ContourKind::kOuter) outer_of[static_cast<std::size_t>(component_of[i])] = i;
  }
  for (std::size_t i = 0; i < contours.size(); ++i) {
    if (contours[i].kind == ContourKind::kHole) contours[i].parent = outer_of[static_cast<std::size_t>(component_of[i])];
  }
  return contours;
}

Ring lattice_to_geo(const std::vector<LatticePoint>& ring, int z, std::int64_t origin_x, std::int64_t origin_y) {
  Ring out;
  out.reserve(ring.size());
  for (const LatticePoint& p : ring) {
    out.push_back(unproject({static_cast<double>(origin_x + p.x), static_cast<double>(origin_y + p.y)}, z));
  }
  return out;
}

Ring contour_to_geo(const PixelContour& c, const TileId& t) {
  validate(t);
  return lattice_to_geo(c.ring, t.z, t.x * kTileSize, t.y * kTileSize);
}

Ring simplify_at_zoom(const Ring& ring, double tol_px, int z) {
  if (!is_closed(ring)) throw GeometryError("cannot simplify an open ring");
  if (!(tol_px >= 0.0)) throw DomainError("simplification tolerance must be non-negative");
  validate_zoom(z);

  std::vector<Point2> pts;
  pts.reserve(ring.size() - 1);
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const GlobalPixel g = project(ring[i], z);
    pts.push_back({g.x, g.y});
  }
  const std::vector<std::size_t> base = non_collinear(pts);
  if (base.size() < 3) return ring;
  const Ring unsimplified = pick(ring, base);
  if (tol_px == 0.0) return unsimplified;

  // Closed-ring Douglas–Peucker: split at the vertex farthest from the first one.
  std::vector<Point2> reduced;
  reduced.reserve(base.size() + 1);
  for (std::size_t i : base) reduced.push_back(pts[i]);
  const std::size_t n = reduced.size();
  std::size_t far = 0;
  double far_d = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double d = std::hypot(reduced[i].x - reduced[0].x, reduced[i].y - reduced[0].y);
    if (d > far_d) {
      far_d = d;
      far = i;
    }
  }
  reduced.push_back(reduced[0]);
  std::vector<char> keep(n + 1, 0);
  keep[0] = keep[far] = keep[n] = 1;
  douglas_peucker(reduced, 0, far, tol_px, &keep);
  douglas_peucker(reduced, far, n, tol_px, &keep);

  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) chosen.push_back(base[i]);
  }
  if (chosen.size() < 3) return unsimplified;
  std::vector<Point2> check;
  for (std::size_t i : chosen) check.push_back(pts[i]);
  check.push_back(check.front());
  if (!is_simple_ring(check) || signed_area(check) == 0.0) return unsimplified;
  return pick(ring, chosen);
}

Ring simplify(const Ring& ring, double tol_px, const TileId& t) {
  validate(t);
  // Translating into the tile frame does not change any distance, so the
  // global frame of the tile's zoom is used directly.
  return simplify_at_zoom(ring, tol_px, t.z);
}

GeoPolygon simplify_polygon(const GeoPolygon& poly, double tol_px, int z) {
  GeoPolygon out;
  out.exterior = simplify_at_zoom(poly.exterior, tol_px, z);
  for (const Ring& h : poly.holes) out.holes.push_back(simplify_at_zoom(h, tol_px, z));
  if (tol_px == 0.0 || out.holes.empty() || is_valid_polygon(out)) return out;
  return simplify_polygon(poly, 0.0, z);
}

std::vector<GeoPolygon> vectorize_window(const BinaryMask& mask, int z, std::int64_t origin_x,
                                         std::int64_t origin_y, double tol_px) {
  validate_zoom(z);
  if (!(tol_px >= 0.0)) throw DomainError("simplification tolerance must be non-negative");
  const std::vector<PixelContour> contours = extract_contours(mask);
  std::vector<GeoPolygon> polys;
  std::vector<std::size_t> poly_of(contours.size(), 0);
  for (std::size_t i = 0; i < contours.size(); ++i) {
    if (contours[i].kind != ContourKind::kOuter) continue;
    poly_of[i] = polys.size();
    polys.push_back({lattice_to_geo(contours[i].ring, z, origin_x, origin_y), {}});
  }
  for (const PixelContour& c : contours) {
    if (c.kind != ContourKind::kHole || !c.parent) continue;
    polys[poly_of[*c.parent]].holes.push_back(lattice_to_geo(c.ring, z, origin_x, origin_y));
  }
  if (tol_px > 0.0) {
    for (GeoPolygon& p : polys) p = simplify_polygon(p, tol_px, z);
  }
  return polys;
}

std::vector<GeoPolygon> vectorize_tile(const BinaryMask& mask, const TileId& t, double tol_px) {
  validate(t);
  if (mask.width() != kTileSize || mask.height() != kTileSize) throw DomainError("tile masks must be 256x256");
  return vectorize_window(mask, t.z, t.x * kTileSize, t.y * kTileSize, tol_px);
}

}  // namespace footpath
