#include "footpath/geojson.hpp"

#include <cstdio>

#include <nlohmann/json.hpp>

#include "footpath/errors.hpp"
#include "footpath/raster.hpp"

namespace footpath {

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords) {
  if (!coords.is_array()) throw GeometryError("ring coordinates must be an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw GeometryError("position must be [lon, lat]");
    }
    ring.push_back({pos[1].get<double>(), pos[0].get<double>()});
  }
  return ring;
}

GeoPolygon parse_polygon(const json& coords) {
  if (!coords.is_array() || coords.empty()) throw GeometryError("polygon needs at least one ring");
  GeoPolygon poly;
  poly.exterior = parse_ring(coords[0]);
  for (std::size_t i = 1; i < coords.size(); ++i) poly.holes.push_back(parse_ring(coords[i]));
  return poly;
}

void collect_geometry(const json& geom, std::vector<GeoPolygon>* out) {
  if (geom.is_null()) return;
  const std::string type = geom.value("type", "");
  if (type == "Polygon") {
    out->push_back(parse_polygon(geom.at("coordinates")));
  } else if (type == "MultiPolygon") {
    for (const json& p : geom.at("coordinates")) out->push_back(parse_polygon(p));
  } else {
    throw GeometryError("unsupported geometry type '" + type + "' (expected Polygon or MultiPolygon)");
  }
}

}  // namespace

std::vector<GeoPolygon> parse_geojson_polygons(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GeometryError(std::string("GeoJSON parse error: ") + e.what());
  }
  std::vector<GeoPolygon> out;
  try {
    const std::string type = doc.value("type", "");
    if (type == "FeatureCollection") {
      for (const json& f : doc.at("features")) collect_geometry(f.at("geometry"), &out);
    } else if (type == "Feature") {
      collect_geometry(doc.at("geometry"), &out);
    } else {
      collect_geometry(doc, &out);
    }
  } catch (const json::exception& e) {
    throw GeometryError(std::string("malformed GeoJSON: ") + e.what());
  }
  return out;
}

VectorNetwork parse_network(std::string_view text) {
  VectorNetwork net;
  net.polygons = parse_geojson_polygons(text);
  for (std::size_t i = 0; i < net.polygons.size(); ++i) {
    GeoPolygon& p = net.polygons[i];
    try {
      for (const GeoPoint& q : p.exterior) validate(GeoPoint{q.lat, q.lon});
      validate_polygon(p);
    } catch (const DomainError& e) {
      throw GeometryError("polygon " + std::to_string(i) + ": " + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError("polygon " + std::to_string(i) + ": " + e.what());
    }
    normalize_orientation(&p);
  }
  return net;
}

VectorNetwork load_network(const std::filesystem::path& path) {
  const Bytes data = read_file(path);
  return parse_network(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string format_fixed(double v, int digits) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace footpath
