#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "footpath/errors.hpp"
#include "footpath/tile_client.hpp"
#include "footpath/tile_tree.hpp"
#include "test_support.hpp"

namespace footpath {
namespace {

// Serves a fixed 256×256 gradient tile, with scripted
// failures per URL. Tracks how many requests are in flight at once.
class FakeServer : public Transport {
 public:
  HttpResponse get(const std::string& url) override {
    const int now = ++in_flight_;
    {
      std::lock_guard lock(mutex_);
      max_in_flight_ = std::max(max_in_flight_, now);
      urls_.push_back(url);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    --in_flight_;

    std::lock_guard lock(mutex_);
    auto& script = scripts_[path_of(url)];
    if (!script.empty()) {
      const int status = script.front();
      script.erase(script.begin());
      if (status < 0) throw TransportError("connection reset");
      if (status != 200) return {status, {}};
    }
    if (offline) throw TransportError("connection refused");
    if (body_size_ != size) {
      RgbImage img{size, size, std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size * 3, 0)};
      for (std::size_t i = 0; i < img.rgb.size(); i += 3) img.rgb[i] = static_cast<std::uint8_t>(i / 768);
      body_ = encode_rgb_png(img);
      body_size_ = size;
    }
    return {200, body_};
  }

  // Responses for one "z/x/y": HTTP status codes, or -1 for a transport failure.
  void script(const std::string& zxy, std::vector<int> statuses) {
    std::lock_guard lock(mutex_);
    scripts_[zxy] = std::move(statuses);
  }
  std::size_t requests() const {
    std::lock_guard lock(mutex_);
    return urls_.size();
  }
  std::vector<std::string> urls() const {
    std::lock_guard lock(mutex_);
    return urls_;
  }
  int max_in_flight() const {
    std::lock_guard lock(mutex_);
    return max_in_flight_;
  }

  bool offline = false;
  int size = 256;
  int delay_ms = 0;

 private:
  static std::string path_of(const std::string& url) {
    const auto start = url.find("/tiles/") + 7;
    return url.substr(start, url.find('.', start) - start);
  }

  mutable std::mutex mutex_;
  std::map<std::string, std::vector<int>> scripts_;
  std::vector<std::string> urls_;
  std::atomic<int> in_flight_{0};
  int max_in_flight_ = 0;
  Bytes body_;
  int body_size_ = 0;
};

const TileId kTile{1893047, 1286844, 21};

struct Fixture {
  Fixture() : server(std::make_shared<FakeServer>()), cache("cache") {}
  TileClient client(TileSource src = {}) {
    if (src.url_template.empty()) src.url_template = "http://tiles.test/tiles/{z}/{x}/{y}.png";
    return TileClient(src, cache.path(), server, [this](std::chrono::milliseconds d) {
      std::lock_guard lock(mutex);
      sleeps.push_back(d);
    });
  }
  std::shared_ptr<FakeServer> server;
  testing::TempDir cache;
  std::mutex mutex;
  std::vector<std::chrono::milliseconds> sleeps;
};

BBox four_by_four() {
  const BBox a = tile_to_bbox(kTile);
  const BBox b = tile_to_bbox({kTile.x + 3, kTile.y + 3, 21});
  const double eps = (a.east - a.west) * 1e-3;
  return {a.west + eps, b.south + eps, b.east - eps, a.north - eps};
}

TEST(TileSource, UrlTemplate) {
  TileSource src{"https://x.test/{z}/{x}/{y}.jpg", std::nullopt, 2, 1};
  EXPECT_EQ(tile_url(src, kTile), "https://x.test/21/1893047/1286844.jpg");
  src.auth_token = "a b&c";
  EXPECT_EQ(tile_url(src, kTile), "https://x.test/21/1893047/1286844.jpg?key=a%20b%26c");
  src.url_template = "https://x.test/t?z={z}&x={x}&y={y}";
  EXPECT_EQ(tile_url(src, kTile), "https://x.test/t?z=21&x=1893047&y=1286844&key=a%20b%26c");
}

TEST(TileSource, Validation) {
  EXPECT_THROW(validate(TileSource{"http://x/{z}/{x}.png"}), ConfigError);
  EXPECT_THROW(validate(TileSource{"http://x/{z}/{x}/{y}/{y}.png"}), ConfigError);
  EXPECT_THROW(validate(TileSource{"http://x/{z}/{x}/{y}.png", std::nullopt, 0, 3}), ConfigError);
  EXPECT_THROW(validate(TileSource{"http://x/{z}/{x}/{y}.png", std::nullopt, 1, -1}), ConfigError);
  EXPECT_NO_THROW(validate(TileSource{"http://x/{z}/{x}/{y}.png", std::nullopt, 1, 0}));
}

TEST(TileClient, FetchCachesAsPng) {
  Fixture f;
  const TileImage img = f.client().fetch_tile(kTile);
  EXPECT_EQ(img.pixels.width, 256);
  EXPECT_EQ(img.pixels.height, 256);
  const auto path = tile_path(f.cache.path(), kTile);
  ASSERT_TRUE(std::filesystem::exists(path));
  const RgbImage cached = decode_image(read_file(path));
  EXPECT_EQ(cached.rgb, img.pixels.rgb);
  EXPECT_EQ(f.server->requests(), 1u);
}

TEST(TileClient, CacheHitWhileOffline) {
  Fixture f;
  f.client().fetch_tile(kTile);
  f.server->offline = true;
  const TileImage img = f.client().fetch_tile(kTile);
  EXPECT_EQ(img.pixels.width, 256);
  EXPECT_EQ(f.server->requests(), 1u);
}

TEST(TileClient, NotFoundIsServerErrorWithoutCacheEntry) {
  Fixture f;
  f.server->script("21/1893047/1286844", {404});
  try {
    f.client().fetch_tile(kTile);
    FAIL() << "expected ServerError";
  } catch (const ServerError& e) {
    EXPECT_EQ(e.status(), 404);
  }
  EXPECT_FALSE(std::filesystem::exists(tile_path(f.cache.path(), kTile)));
  EXPECT_EQ(f.server->requests(), 1u);
  EXPECT_TRUE(f.sleeps.empty());
}

TEST(TileClient, RetriesWithDoublingBackoff) {
  Fixture f;
  f.server->script("21/1893047/1286844", {503, -1, 429});
  EXPECT_NO_THROW(f.client().fetch_tile(kTile));
  EXPECT_EQ(f.server->requests(), 4u);
  using std::chrono::milliseconds;
  EXPECT_EQ(f.sleeps, (std::vector<milliseconds>{milliseconds(500), milliseconds(1000), milliseconds(2000)}));
}

TEST(TileClient, GivesUpAfterRetryLimit) {
  Fixture f;
  f.server->script("21/1893047/1286844", {500, 500, 500});
  TileSource src{"http://tiles.test/tiles/{z}/{x}/{y}.png", std::nullopt, 1, 2};
  try {
    f.client(src).fetch_tile(kTile);
    FAIL() << "expected ServerError";
  } catch (const ServerError& e) {
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(f.server->requests(), 3u);

  Fixture g;
  g.server->offline = true;
  EXPECT_THROW(g.client(src).fetch_tile(kTile), TransportError);
  EXPECT_EQ(g.server->requests(), 3u);
}

TEST(TileClient, WrongSizeIsFormatError) {
  Fixture f;
  f.server->size = 128;
  EXPECT_THROW(f.client().fetch_tile(kTile), FormatError);
  EXPECT_FALSE(std::filesystem::exists(tile_path(f.cache.path(), kTile)));
}

TEST(TileClient, TokenSentAsKeyParameter) {
  Fixture f;
  TileSource src{"http://tiles.test/tiles/{z}/{x}/{y}.png", std::string("s3cret"), 1, 0};
  f.client(src).fetch_tile(kTile);
  ASSERT_EQ(f.server->urls().size(), 1u);
  EXPECT_EQ(f.server->urls()[0], "http://tiles.test/tiles/21/1893047/1286844.png?key=s3cret");
}

TEST(TileClient, FourByFourRegion) {
  Fixture f;
  const std::vector<TileId> tiles = f.client().fetch_region(four_by_four(), 21);
  ASSERT_EQ(tiles.size(), 16u);
  EXPECT_TRUE(std::is_sorted(tiles.begin(), tiles.end()));
  EXPECT_EQ(list_tile_tree(f.cache.path()), tiles);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(f.cache.path())) files += e.is_regular_file();
  EXPECT_EQ(files, 16u);
}

TEST(TileClient, SecondFetchMakesNoRequests) {
  Fixture f;
  const TileClient client = f.client();
  client.fetch_region(four_by_four(), 21);
  const std::size_t first = f.server->requests();
  EXPECT_EQ(client.fetch_region(four_by_four(), 21).size(), 16u);
  EXPECT_EQ(f.server->requests(), first);
}

TEST(TileClient, ConcurrencyBoundedByMaxParallel) {
  Fixture f;
  f.server->delay_ms = 20;
  TileSource src{"http://tiles.test/tiles/{z}/{x}/{y}.png", std::nullopt, 3, 0};
  f.client(src).fetch_region(four_by_four(), 21);
  EXPECT_LE(f.server->max_in_flight(), 3);
  EXPECT_GE(f.server->max_in_flight(), 2);
}

TEST(TileClient, RegionErrorsAggregatedAndProgressKept) {
  Fixture f;
  f.server->script("21/1893048/1286845", {404});
  f.server->script("21/1893050/1286847", {403});
  try {
    f.client().fetch_region(four_by_four(), 21);
    FAIL() << "expected RegionFetchError";
  } catch (const RegionFetchError& e) {
    EXPECT_EQ(e.failures().size(), 2u);
    EXPECT_EQ(e.fetched().size(), 14u);
    EXPECT_EQ(e.failures()[0].first, (TileId{1893048, 1286845, 21}));
  }
  EXPECT_EQ(list_tile_tree(f.cache.path()).size(), 14u);
}

TEST(TileClient, MelbourneBoxMatchesEnumeration) {
  Fixture f;
  const BBox box{144.9581, -37.8186, 144.9681, -37.8086};
  // Count of z=21 tiles whose footprint overlaps the box, by scanning columns
  // and rows independently.
  std::int64_t cols = 0, rows = 0;
  const TileId nw = latlon_to_tile({box.north, box.west}, 21);
  for (std::int64_t x = nw.x - 2; x < nw.x + 200; ++x) {
    const BBox t = tile_to_bbox({x, nw.y, 21});
    cols += t.west < box.east && box.west < t.east;
  }
  for (std::int64_t y = nw.y - 2; y < nw.y + 200; ++y) {
    const BBox t = tile_to_bbox({nw.x, y, 21});
    rows += t.south < box.north && box.south < t.north;
  }
  TileSource src{"http://tiles.test/tiles/{z}/{x}/{y}.png", std::nullopt, 8, 0};
  const std::vector<TileId> fetched = f.client(src).fetch_region(box, 21);
  EXPECT_EQ(static_cast<std::int64_t>(fetched.size()), cols * rows);
  EXPECT_EQ(list_tile_tree(f.cache.path()).size(), fetched.size());
}

}  // namespace
}  // namespace footpath
