#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "footpath/errors.hpp"
#include "footpath/geo_tiles.hpp"

namespace footpath {
namespace {

// Melbourne CBD (Flinders St), evaluated independently in double precision:
// x = 1893047.264..., y = 1286844.138... at z = 21.
constexpr GeoPoint kMelbourne{-37.8136, 144.9631};
constexpr std::int64_t kMelbourneX = 1893047;
constexpr std::int64_t kMelbourneY = 1286844;

TEST(GeoTiles, WorldTile) {
  EXPECT_EQ(latlon_to_tile({0.0, -180.0}, 0), (TileId{0, 0, 0}));
  const BBox b = tile_to_bbox({0, 0, 0});
  EXPECT_EQ(b.west, -180.0);
  EXPECT_EQ(b.east, 180.0);
  EXPECT_NEAR(b.north, kMaxLatitude, 1e-9);
  EXPECT_NEAR(b.south, -kMaxLatitude, 1e-9);
}

TEST(GeoTiles, TopLeftQuadrant) {
  EXPECT_EQ(latlon_to_tile({std::nextafter(kMaxLatitude, 0.0), -180.0}, 1), (TileId{0, 0, 1}));
}

TEST(GeoTiles, QuadrantsArePointReflections) {
  const BBox a = tile_to_bbox({0, 0, 1});
  const BBox b = tile_to_bbox({1, 1, 1});
  EXPECT_EQ(a.west, -b.east);
  EXPECT_EQ(a.east, -b.west);
  EXPECT_EQ(a.north, -b.south);
  EXPECT_EQ(a.south, -b.north);
  EXPECT_EQ(a.east, 0.0);
  EXPECT_EQ(a.south, 0.0);
}

TEST(GeoTiles, ZoomOneTilesPartitionTheWorld) {
  const BBox w = tile_to_bbox({0, 0, 0});
  const BBox nw = tile_to_bbox({0, 0, 1});
  const BBox ne = tile_to_bbox({1, 0, 1});
  const BBox sw = tile_to_bbox({0, 1, 1});
  const BBox se = tile_to_bbox({1, 1, 1});
  EXPECT_EQ(nw.east, ne.west);
  EXPECT_EQ(sw.east, se.west);
  EXPECT_EQ(nw.south, sw.north);
  EXPECT_EQ(ne.south, se.north);
  EXPECT_EQ(nw.west, w.west);
  EXPECT_EQ(ne.east, w.east);
  EXPECT_EQ(nw.north, w.north);
  EXPECT_EQ(se.south, w.south);
}

TEST(GeoTiles, MelbourneTile) {
  const TileId t = latlon_to_tile(kMelbourne, 21);
  EXPECT_EQ(t, (TileId{kMelbourneX, kMelbourneY, 21}));
  const BBox b = tile_to_bbox(t);
  EXPECT_NEAR(b.east - b.west, 360.0 / std::ldexp(1.0, 21), 1e-12);
  EXPECT_TRUE(b.contains(kMelbourne));
}

TEST(GeoTiles, PixelCorners) {
  const GeoPoint nw = pixel_to_latlon({{0, 0, 0}, 0.0, 0.0});
  EXPECT_NEAR(nw.lat, kMaxLatitude, 1e-8);
  EXPECT_EQ(nw.lon, -180.0);
  const GeoPoint mid = pixel_to_latlon({{0, 0, 0}, 128.0, 128.0});
  EXPECT_NEAR(mid.lat, 0.0, 1e-12);
  EXPECT_NEAR(mid.lon, 0.0, 1e-12);
  const PixelCoord pc = latlon_to_pixel({0.0, 0.0}, 0);
  EXPECT_EQ(pc.tile, (TileId{0, 0, 0}));
  EXPECT_NEAR(pc.px, 128.0, 1e-9);
  EXPECT_NEAR(pc.py, 128.0, 1e-9);
}

TEST(GeoTiles, WestEdgeBelongsToEasternTile) {
  const BBox b = tile_to_bbox({kMelbourneX, kMelbourneY, 21});
  const GeoPoint on_edge{(b.north + b.south) / 2.0, b.west};
  const PixelCoord pc = latlon_to_pixel(on_edge, 21);
  EXPECT_EQ(pc.tile.x, kMelbourneX);
  EXPECT_EQ(pc.px, 0.0);
  EXPECT_EQ(latlon_to_tile(on_edge, 21).x, kMelbourneX);
}

TEST(GeoTiles, GroundResolution) {
  EXPECT_DOUBLE_EQ(ground_resolution(0.0, 0), 156543.03392);
  EXPECT_NEAR(ground_resolution(60.0, 7), ground_resolution(0.0, 7) / 2.0, 1e-9);
  // 156543.03392 · cos(37.8136°) / 2^21
  EXPECT_NEAR(ground_resolution(-37.8136, 21), 0.058970, 1e-6);
}

TEST(GeoTiles, InverseCompositionOnRandomPoints) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-kMaxLatitude, kMaxLatitude);
  std::uniform_real_distribution<double> lon(-180.0, std::nextafter(180.0, 0.0));
  std::uniform_int_distribution<int> zoom(0, kMaxZoom);
  for (int i = 0; i < 1000; ++i) {
    const GeoPoint p{lat(rng), lon(rng)};
    const int z = zoom(rng);
    const PixelCoord pc = latlon_to_pixel(p, z);
    ASSERT_GE(pc.px, 0.0);
    ASSERT_LT(pc.px, 256.0);
    ASSERT_GE(pc.py, 0.0);
    ASSERT_LT(pc.py, 256.0);
    ASSERT_EQ(pc.tile, latlon_to_tile(p, z));
    const GeoPoint q = pixel_to_latlon(pc);
    ASSERT_NEAR(q.lat, p.lat, 1e-9);
    ASSERT_NEAR(q.lon, p.lon, 1e-9);
    ASSERT_TRUE(tile_to_bbox(pc.tile).contains(p));
  }
}

TEST(GeoTiles, RejectsOutOfRange) {
  EXPECT_THROW(latlon_to_tile({86.0, 0.0}, 3), DomainError);
  EXPECT_THROW(latlon_to_tile({0.0, 180.0}, 3), DomainError);
  EXPECT_THROW(latlon_to_tile({0.0, 0.0}, 24), DomainError);
  EXPECT_THROW(latlon_to_tile({0.0, 0.0}, -1), DomainError);
  EXPECT_THROW(tile_to_bbox({2, 0, 1}), DomainError);
  EXPECT_THROW(validate(BBox{10.0, 0.0, 5.0, 1.0}), DomainError);
}

TEST(GeoTiles, TileIdText) {
  const TileId t{kMelbourneX, kMelbourneY, 21};
  EXPECT_EQ(to_string(t), "21/1893047/1286844");
  EXPECT_EQ(parse_tile_id("21/1893047/1286844"), t);
  EXPECT_THROW(parse_tile_id("21/1893047"), DomainError);
  EXPECT_THROW(parse_tile_id("1/2/0"), DomainError);
}

// Independent enumeration: every tile in a generous neighbourhood whose
// footprint has positive-area overlap with the box.
std::vector<TileId> brute_force_tiles(const BBox& box, int z) {
  const TileId c = latlon_to_tile({(box.north + box.south) / 2, (box.west + box.east) / 2}, z);
  std::vector<TileId> out;
  for (std::int64_t y = c.y - 40; y <= c.y + 40; ++y) {
    for (std::int64_t x = c.x - 40; x <= c.x + 40; ++x) {
      const BBox t = tile_to_bbox({x, y, z});
      if (t.west < box.east && box.west < t.east && t.south < box.north && box.south < t.north) {
        out.push_back({x, y, z});
      }
    }
  }
  return out;
}

TEST(GeoTiles, TilesInBboxMatchesEnumeration) {
  const BBox box{144.9581, -37.8186, 144.9681, -37.8086};
  const std::vector<TileId> expected = brute_force_tiles(box, 17);
  EXPECT_EQ(tiles_in_bbox(box, 17), expected);
  EXPECT_FALSE(expected.empty());
}

TEST(GeoTiles, TilesInBboxDegenerateAndWorld) {
  const std::vector<TileId> one = tiles_in_bbox({144.9631, -37.8136, 144.9631, -37.8136}, 21);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.front(), (TileId{kMelbourneX, kMelbourneY, 21}));
  const std::vector<TileId> world = tiles_in_bbox({-180.0, -kMaxLatitude, 180.0, kMaxLatitude}, 0);
  ASSERT_EQ(world.size(), 1u);
  EXPECT_EQ(world.front(), (TileId{0, 0, 0}));
  EXPECT_EQ(tiles_in_bbox({-180.0, -kMaxLatitude, 180.0, kMaxLatitude}, 2).size(), 16u);
}

TEST(GeoTiles, TilesInBboxOnExactTileEdges) {
  const BBox a = tile_to_bbox({100, 200, 10});
  const BBox b = tile_to_bbox({103, 203, 10});
  const std::vector<TileId> tiles = tiles_in_bbox({a.west, b.south, b.east, a.north}, 10);
  ASSERT_EQ(tiles.size(), 16u);
  EXPECT_EQ(tiles.front(), (TileId{100, 200, 10}));
  EXPECT_EQ(tiles.back(), (TileId{103, 203, 10}));
}

}  // namespace
}  // namespace footpath
