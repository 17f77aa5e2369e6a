#include "footpath/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "footpath/errors.hpp"

namespace footpath {

namespace {

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

int sign(double v) { return (v > 0.0) - (v < 0.0); }

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool share_endpoint(const Segment& s, const Segment& t) {
  return s.a == t.a || s.a == t.b || s.b == t.a || s.b == t.b;
}

}  // namespace

double signed_area(std::span<const Point2> ring) {
  if (ring.size() < 3) return 0.0;
  // Shift to the first vertex to keep products small for geographic inputs.
  const Point2 o = ring[0];
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    sum += (ring[i].x - o.x) * (ring[i + 1].y - o.y) - (ring[i + 1].x - o.x) * (ring[i].y - o.y);
  }
  if (!(ring.front() == ring.back())) {
    sum += (ring.back().x - o.x) * (ring.front().y - o.y) - (ring.front().x - o.x) * (ring.back().y - o.y);
  }
  return 0.5 * sum;
}

double signed_area(const Ring& ring) {
  const PointRing pts = to_point_ring(ring);
  return signed_area(pts);
}

bool is_closed(std::span<const Point2> ring) { return ring.size() >= 2 && ring.front() == ring.back(); }

bool is_closed(const Ring& ring) {
  return ring.size() >= 2 && ring.front().lat == ring.back().lat && ring.front().lon == ring.back().lon;
}

bool point_in_ring(const Point2& p, std::span<const Point2> ring) {
  bool inside = false;
  const std::size_t n = is_closed(ring) ? ring.size() - 1 : ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2& a = ring[i];
    const Point2& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(const GeoPoint& p, const GeoPolygon& poly) {
  const Point2 q = to_point2(p);
  bool inside = point_in_ring(q, to_point_ring(poly.exterior));
  for (const Ring& h : poly.holes) {
    if (point_in_ring(q, to_point_ring(h))) inside = !inside;
  }
  return inside;
}

bool segments_conflict(const Segment& s, const Segment& t) {
  const int o1 = sign(orient(s.a, s.b, t.a));
  const int o2 = sign(orient(s.a, s.b, t.b));
  const int o3 = sign(orient(t.a, t.b, s.a));
  const int o4 = sign(orient(t.a, t.b, s.b));

  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: measure the overlap along the dominant axis.
    const bool use_x = std::abs(s.b.x - s.a.x) + std::abs(t.b.x - t.a.x) >=
                       std::abs(s.b.y - s.a.y) + std::abs(t.b.y - t.a.y);
    auto lo = [use_x](const Segment& g) { return use_x ? std::min(g.a.x, g.b.x) : std::min(g.a.y, g.b.y); };
    auto hi = [use_x](const Segment& g) { return use_x ? std::max(g.a.x, g.b.x) : std::max(g.a.y, g.b.y); };
    const double overlap = std::min(hi(s), hi(t)) - std::max(lo(s), lo(t));
    if (overlap > 0.0) return true;
    if (overlap < 0.0) return false;
    return !share_endpoint(s, t);
  }

  bool intersect = false;
  if (o1 != o2 && o3 != o4) intersect = true;
  if (o1 == 0 && on_segment(s.a, s.b, t.a)) intersect = true;
  if (o2 == 0 && on_segment(s.a, s.b, t.b)) intersect = true;
  if (o3 == 0 && on_segment(t.a, t.b, s.a)) intersect = true;
  if (o4 == 0 && on_segment(t.a, t.b, s.b)) intersect = true;
  if (!intersect) return false;
  // Non-collinear segments meet in a single point; allowed only when that
  // point is an endpoint of both.
  return !share_endpoint(s, t);
}

bool any_conflict(std::span<const Segment> segments) {
  std::vector<std::size_t> order(segments.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto min_x = [&](std::size_t i) { return std::min(segments[i].a.x, segments[i].b.x); };
  auto max_x = [&](std::size_t i) { return std::max(segments[i].a.x, segments[i].b.x); };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return min_x(a) < min_x(b); });
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Segment& s = segments[order[i]];
    const double s_max_x = max_x(order[i]);
    const double s_min_y = std::min(s.a.y, s.b.y);
    const double s_max_y = std::max(s.a.y, s.b.y);
    for (std::size_t j = i + 1; j < order.size() && min_x(order[j]) <= s_max_x; ++j) {
      const Segment& t = segments[order[j]];
      if (std::max(t.a.y, t.b.y) < s_min_y || std::min(t.a.y, t.b.y) > s_max_y) continue;
      if (segments_conflict(s, t)) return true;
    }
  }
  return false;
}

void append_ring_segments(std::span<const Point2> ring, std::vector<Segment>* out) {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (ring[i] == ring[i + 1]) continue;
    out->push_back({ring[i], ring[i + 1]});
  }
}

bool is_simple_ring(std::span<const Point2> ring) {
  if (!is_closed(ring) || ring.size() < 4) return false;
  std::vector<Point2> distinct(ring.begin(), ring.end() - 1);
  std::sort(distinct.begin(), distinct.end(), [](const Point2& a, const Point2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) return false;
  std::vector<Segment> segs;
  append_ring_segments(ring, &segs);
  return !any_conflict(segs);
}

bool is_valid_polygon(const GeoPolygon& poly) {
  std::vector<Segment> all;
  const PointRing ext = to_point_ring(poly.exterior);
  if (!is_simple_ring(ext)) return false;
  append_ring_segments(ext, &all);
  for (const Ring& h : poly.holes) {
    const PointRing pts = to_point_ring(h);
    if (!is_simple_ring(pts)) return false;
    append_ring_segments(pts, &all);
  }
  return poly.holes.empty() || !any_conflict(all);
}

void validate_ring(const Ring& ring) {
  if (!is_closed(ring)) throw GeometryError("ring is not closed");
  if (ring.size() < 4) throw GeometryError("ring has fewer than four vertices");
  if (!is_simple_ring(to_point_ring(ring))) throw GeometryError("ring is self-intersecting or degenerate");
}

void validate_polygon(const GeoPolygon& poly) {
  validate_ring(poly.exterior);
  for (const Ring& h : poly.holes) validate_ring(h);
  if (!is_valid_polygon(poly)) throw GeometryError("polygon rings intersect each other");
}

void normalize_orientation(GeoPolygon* poly) {
  if (signed_area(poly->exterior) < 0.0) std::reverse(poly->exterior.begin(), poly->exterior.end());
  for (Ring& h : poly->holes) {
    if (signed_area(h) > 0.0) std::reverse(h.begin(), h.end());
  }
}

PointRing to_point_ring(const Ring& ring) {
  PointRing out;
  out.reserve(ring.size());
  for (const GeoPoint& p : ring) out.push_back(to_point2(p));
  return out;
}

Ring to_geo_ring(std::span<const Point2> ring) {
  Ring out;
  out.reserve(ring.size());
  for (const Point2& p : ring) out.push_back(to_geo(p));
  return out;
}

double polygon_area_deg2(const GeoPolygon& poly) {
  double a = std::abs(signed_area(poly.exterior));
  for (const Ring& h : poly.holes) a -= std::abs(signed_area(h));
  return a;
}

}  // namespace footpath
