#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "footpath/geometry.hpp"
#include "footpath/mask_dataset.hpp"

namespace footpath {

// Polygon and MultiPolygon geometries from a FeatureCollection, a Feature or
// a bare geometry object. Features with null geometry are skipped; any other
// geometry type is a GeometryError. Coordinates are read as [lon, lat].
std::vector<GeoPolygon> parse_geojson_polygons(std::string_view text);

// Reads a footpath network, validates every ring (closed, simple, inside the
// Web-Mercator range) and orients exteriors counterclockwise, holes clockwise.
VectorNetwork load_network(const std::filesystem::path& path);
VectorNetwork parse_network(std::string_view text);

// Fixed-point decimal with `digits` fraction digits ("%.*f").
std::string format_fixed(double v, int digits);

}  // namespace footpath
