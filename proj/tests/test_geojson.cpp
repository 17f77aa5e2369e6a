#include <gtest/gtest.h>

#include "footpath/errors.hpp"
#include "footpath/geojson.hpp"

namespace footpath {
namespace {

TEST(GeoJsonInput, FeatureCollectionWithMultiPolygonAndNull) {
  const std::string text = R"({"type":"FeatureCollection","features":[
    {"type":"Feature","properties":{},"geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}},
    {"type":"Feature","properties":{},"geometry":null},
    {"type":"Feature","properties":{},"geometry":{"type":"MultiPolygon","coordinates":[
      [[[2,2],[3,2],[3,3],[2,2]]],
      [[[4,4],[8,4],[8,8],[4,8],[4,4]],[[5,5],[5,6],[6,6],[5,5]]]]}}]})";
  const auto polys = parse_geojson_polygons(text);
  ASSERT_EQ(polys.size(), 3u);
  EXPECT_EQ(polys[0].exterior[1].lon, 1.0);
  EXPECT_EQ(polys[0].exterior[1].lat, 0.0);
  EXPECT_EQ(polys[2].holes.size(), 1u);
}

TEST(GeoJsonInput, BareGeometry) {
  EXPECT_EQ(parse_geojson_polygons(R"({"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]})").size(), 1u);
}

TEST(GeoJsonInput, RejectsOtherGeometry) {
  EXPECT_THROW(parse_geojson_polygons(R"({"type":"LineString","coordinates":[[0,0],[1,1]]})"), GeometryError);
  EXPECT_THROW(parse_geojson_polygons("not json"), Error);
}

TEST(GeoJsonInput, NetworkIsOrientedOnLoad) {
  // Clockwise exterior and counterclockwise hole in, opposite out.
  const VectorNetwork net = parse_network(
      R"({"type":"Polygon","coordinates":[[[0,0],[0,4],[4,4],[4,0],[0,0]],[[1,1],[2,1],[2,2],[1,2],[1,1]]]})");
  ASSERT_EQ(net.polygons.size(), 1u);
  EXPECT_GT(signed_area(net.polygons[0].exterior), 0.0);
  EXPECT_LT(signed_area(net.polygons[0].holes[0]), 0.0);
}

TEST(GeoJsonInput, NetworkValidation) {
  EXPECT_THROW(parse_network(R"({"type":"Polygon","coordinates":[[[0,0],[1,1],[0,1],[1,0],[0,0]]]})"),
               GeometryError);
  EXPECT_THROW(parse_network(R"({"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,1]]]})"), GeometryError);
  EXPECT_THROW(parse_network(R"({"type":"Polygon","coordinates":[[[0,86],[1,86],[1,87],[0,86]]]})"), Error);
}

TEST(GeoJsonInput, FixedDecimals) {
  EXPECT_EQ(format_fixed(144.9631, 9), "144.963100000");
  EXPECT_EQ(format_fixed(-0.5, 2), "-0.50");
}

}  // namespace
}  // namespace footpath
