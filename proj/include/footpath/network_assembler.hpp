#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "footpath/geo_tiles.hpp"
#include "footpath/geometry.hpp"

namespace footpath {

struct Feature {
  GeoPolygon geometry;
  std::vector<TileId> tiles;  // source tiles, sorted
  double area_m2 = 0.0;
};

// Features are pairwise interior-disjoint and ordered by the (row, column) of
// their first source tile, then by their north-west-most vertex.
struct FeatureCollection {
  std::vector<Feature> features;
};

struct TaggedPolygon {
  GeoPolygon polygon;
  TileId tile;
};

// Snaps every vertex to the nearest corner of the global pixel lattice of
// `zoom` (at most half a pixel per axis), merges polygons that share at least
// one lattice edge by cancelling opposite boundary edges, and re-chains the
// surviving edges into rings. Corner-only contact does not merge. Polygons
// that share no edge with any other polygon are returned untouched.
std::vector<GeoPolygon> dissolve(std::span<const GeoPolygon> polys, int zoom);

// Same as dissolve, carrying source tiles and producing finished features:
// polygons are simplified with tol_px after the union and each feature gets
// its area in square metres (pixel area × ground resolution² at its centroid).
FeatureCollection dissolve_features(std::span<const TaggedPolygon> polys, int zoom, double tol_px);

// Stitches per-tile vectorizer output into one layer. All tiles must share a
// zoom (DomainError otherwise).
FeatureCollection merge_tiles(const std::map<TileId, std::vector<GeoPolygon>>& per_tile, double tol_px = 0.0);

// Area in square metres of one polygon at zoom z (pixel-plane shoelace area
// scaled by the ground resolution at the exterior centroid).
double polygon_area_m2(const GeoPolygon& poly, int z);

enum class GeoJsonLayout {
  kFeatureCollection,  // one document
  kFeaturePerLine,     // newline-delimited Feature objects
};

// Byte-stable RFC 7946 text: fixed key order, [lon, lat] with 9 decimals.
std::string format_geojson(const FeatureCollection& fc, GeoJsonLayout layout = GeoJsonLayout::kFeatureCollection);
std::size_t write_geojson(const FeatureCollection& fc, const std::filesystem::path& path,
                          GeoJsonLayout layout = GeoJsonLayout::kFeatureCollection);

}  // namespace footpath
