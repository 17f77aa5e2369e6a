#pragma once

#include <span>
#include <vector>

#include "footpath/geo_tiles.hpp"

namespace footpath {

// Closed ring: first vertex == last vertex.
using Ring = std::vector<GeoPoint>;

struct GeoPolygon {
  Ring exterior;            // counterclockwise in (lon, lat)
  std::vector<Ring> holes;  // clockwise
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using PointRing = std::vector<Point2>;

struct Segment {
  Point2 a;
  Point2 b;
};

inline Point2 to_point2(const GeoPoint& p) { return {p.lon, p.lat}; }
inline GeoPoint to_geo(const Point2& p) { return {p.y, p.x}; }

// Shoelace area, positive for counterclockwise in a y-up frame.
double signed_area(std::span<const Point2> ring);
double signed_area(const Ring& ring);

bool is_closed(std::span<const Point2> ring);
bool is_closed(const Ring& ring);

// Even-odd crossing test against one ring; the closing duplicate is ignored.
bool point_in_ring(const Point2& p, std::span<const Point2> ring);
// Even-odd across the exterior and every hole.
bool point_in_polygon(const GeoPoint& p, const GeoPolygon& poly);

// True when two segments share any point other than a common endpoint, or
// overlap along a stretch of positive length.
bool segments_conflict(const Segment& s, const Segment& t);

// Sweep over all segment pairs (sorted by min x); true on the first conflict.
bool any_conflict(std::span<const Segment> segments);

void append_ring_segments(std::span<const Point2> ring, std::vector<Segment>* out);

// Ring is closed, has at least three distinct vertices, and no two of its
// edges conflict. Rings that touch themselves at a shared vertex pass.
bool is_simple_ring(std::span<const Point2> ring);

// Closed, simple rings whose edges do not conflict with one another.
bool is_valid_polygon(const GeoPolygon& poly);

// Throws GeometryError describing the first violated ring rule.
void validate_ring(const Ring& ring);
void validate_polygon(const GeoPolygon& poly);

// Reverses rings whose winding disagrees with exterior-CCW / hole-CW.
void normalize_orientation(GeoPolygon* poly);

PointRing to_point_ring(const Ring& ring);
Ring to_geo_ring(std::span<const Point2> ring);

// Area in square degrees of exterior minus holes.
double polygon_area_deg2(const GeoPolygon& poly);

}  // namespace footpath
