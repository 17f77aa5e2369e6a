#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "footpath/geo_tiles.hpp"
#include "footpath/geometry.hpp"
#include "footpath/raster.hpp"

namespace footpath {

// A point of the pixel-corner lattice: (col, row) of a pixel's top-left corner.
struct LatticePoint {
  std::int64_t x = 0;
  std::int64_t y = 0;

  friend bool operator==(const LatticePoint&, const LatticePoint&) = default;
  friend auto operator<=>(const LatticePoint& a, const LatticePoint& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

enum class ContourKind { kOuter, kHole };

// Boundary ring on the corner lattice, closed and reduced to its corners.
// Outer rings run counterclockwise as drawn on screen (rows growing
// downwards); holes run clockwise. Foreground is always on the left.
struct PixelContour {
  std::vector<LatticePoint> ring;
  ContourKind kind = ContourKind::kOuter;
  std::optional<std::size_t> parent;  // index of the enclosing outer contour (holes only)
};

// Crack-following boundary extraction: 8-connected foreground, 4-connected
// background. Filling every outer ring and removing its holes reproduces the
// mask exactly. Contours are ordered by their first lattice point in scan order.
std::vector<PixelContour> extract_contours(const BinaryMask& mask);

// Lattice ring of a window whose top-left pixel sits at (origin_x, origin_y)
// on the global pixel plane of zoom z, mapped to geographic coordinates.
Ring lattice_to_geo(const std::vector<LatticePoint>& ring, int z, std::int64_t origin_x, std::int64_t origin_y);
Ring contour_to_geo(const PixelContour& c, const TileId& t);

// Douglas–Peucker in the global pixel frame of zoom z. Every input vertex
// stays within tol_px of the result. With tol_px = 0 only collinear and
// repeated vertices go. Falls back to the tol_px = 0 ring when the simplified
// ring would degenerate or self-intersect. Throws GeometryError for open rings.
Ring simplify_at_zoom(const Ring& ring, double tol_px, int z);
Ring simplify(const Ring& ring, double tol_px, const TileId& t);

// Simplifies every ring of a polygon; if the rings then conflict with each
// other the polygon is returned with only collinear vertices removed.
GeoPolygon simplify_polygon(const GeoPolygon& poly, double tol_px, int z);

// Contours of a window mask converted to polygons (outer ring + its holes),
// then simplified when tol_px > 0.
std::vector<GeoPolygon> vectorize_window(const BinaryMask& mask, int z, std::int64_t origin_x,
                                         std::int64_t origin_y, double tol_px);
std::vector<GeoPolygon> vectorize_tile(const BinaryMask& mask, const TileId& t, double tol_px);

}  // namespace footpath
