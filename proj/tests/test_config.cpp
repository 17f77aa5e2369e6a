#include <gtest/gtest.h>

#include "footpath/config.hpp"
#include "footpath/errors.hpp"
#include "test_support.hpp"

namespace footpath {
namespace {

const std::filesystem::path kBase = "/data/run";

const char* kFull = R"([tile_source]
url_template = https://tiles.test/{z}/{x}/{y}.png
max_parallel = 6
retry_limit = 2

[region]
west = 144.95
south = -37.82
east = 144.97
north = -37.80
zoom = 20

[dirs]
cache = cache
masks_gt = gt
masks_pred = /abs/pred
out = out

[network]
path = net/footpaths.geojson

[vectorize]
tol_px = 0.5

[split]
seed = 99
n_train = 10
n_val = 4
min_foreground = 3

[metrics]
per_image_csv = true

[run]
threads = 2
)";

TEST(Config, Defaults) {
  const PipelineConfig cfg = parse_config("", kBase);
  EXPECT_EQ(cfg.zoom, 21);
  EXPECT_EQ(cfg.tol_px, 1.0);
  EXPECT_EQ(cfg.n_train, 1000u);
  EXPECT_EQ(cfg.n_val, 200u);
  EXPECT_EQ(cfg.tile_source.retry_limit, 3);
  EXPECT_FALSE(cfg.region.has_value());
  EXPECT_TRUE(cfg.out_dir.empty());
  EXPECT_FALSE(cfg.tile_source.auth_token.has_value());
}

TEST(Config, FullFile) {
  const PipelineConfig cfg = parse_config(kFull, kBase);
  EXPECT_EQ(cfg.tile_source.url_template, "https://tiles.test/{z}/{x}/{y}.png");
  EXPECT_EQ(cfg.tile_source.max_parallel, 6);
  EXPECT_EQ(cfg.tile_source.retry_limit, 2);
  ASSERT_TRUE(cfg.region.has_value());
  EXPECT_EQ(cfg.region->west, 144.95);
  EXPECT_EQ(cfg.region->north, -37.80);
  EXPECT_EQ(cfg.zoom, 20);
  EXPECT_EQ(cfg.cache_dir, "/data/run/cache");
  EXPECT_EQ(cfg.masks_pred_dir, "/abs/pred");
  EXPECT_EQ(cfg.network, "/data/run/net/footpaths.geojson");
  EXPECT_EQ(cfg.tol_px, 0.5);
  EXPECT_EQ(cfg.seed, 99u);
  EXPECT_EQ(cfg.n_train, 10u);
  EXPECT_EQ(cfg.n_val, 4u);
  EXPECT_EQ(cfg.min_foreground, 3u);
  EXPECT_TRUE(cfg.per_image_csv);
  EXPECT_EQ(cfg.threads, 2);
}

TEST(Config, OverridesWin) {
  const PipelineConfig cfg =
      parse_config(kFull, kBase, {{"region.zoom", "18"}, {"vectorize.tol_px", "0"}, {"dirs.out", "elsewhere"}});
  EXPECT_EQ(cfg.zoom, 18);
  EXPECT_EQ(cfg.tol_px, 0.0);
  EXPECT_EQ(cfg.out_dir, "/data/run/elsewhere");
}

TEST(Config, TokenPrecedence) {
  EXPECT_EQ(parse_config(kFull, kBase, {}, "from-env").tile_source.auth_token, "from-env");
  EXPECT_EQ(parse_config("[tile_source]\nauth_token = file\n", kBase).tile_source.auth_token, "file");
  EXPECT_EQ(parse_config("[tile_source]\nauth_token = file\n", kBase, {}, "env").tile_source.auth_token, "env");
  EXPECT_EQ(parse_config(kFull, kBase, {{"tile_source.auth_token", "flag"}}, "env").tile_source.auth_token, "flag");
}

TEST(Config, Rejections) {
  EXPECT_THROW(parse_config("[tile_source]\nurl = x\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[bogus]\nx = 1\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("", kBase, {{"region.zoomm", "3"}}), ConfigError);
  EXPECT_THROW(parse_config("", kBase, {{"zoom", "3"}}), ConfigError);
  EXPECT_THROW(parse_config("[region]\nzoom = 24\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[region]\nzoom = twenty\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[vectorize]\ntol_px = -1\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[region]\nwest = 1\neast = 2\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[region]\nwest = 2\nsouth = 0\neast = 1\nnorth = 1\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[dirs]\nmasks_gt = a\nmasks_pred = ./a\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[tile_source]\nurl_template = http://x/{z}/{x}.png\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[split]\nn_train = -3\n", kBase), ConfigError);
  EXPECT_THROW(parse_config("[metrics]\nper_image_csv = maybe\n", kBase), ConfigError);
}

TEST(Config, EchoRoundTrips) {
  const PipelineConfig cfg = parse_config(kFull, kBase, {{"tile_source.auth_token", "secret"}});
  const std::string text = format_config(cfg);
  EXPECT_EQ(text.find("secret"), std::string::npos);
  const PipelineConfig back = parse_config(text, "/elsewhere");
  std::string without_token = text;
  const auto note = without_token.find("; auth_token");
  ASSERT_NE(note, std::string::npos);
  without_token.erase(note, without_token.find('\n', note) + 1 - note);
  EXPECT_EQ(format_config(back), without_token);
  EXPECT_EQ(back.tile_source.url_template, cfg.tile_source.url_template);
  EXPECT_EQ(back.region->south, cfg.region->south);
  EXPECT_EQ(back.cache_dir, cfg.cache_dir);
  EXPECT_EQ(back.network, cfg.network);
  EXPECT_EQ(back.tol_px, cfg.tol_px);
  EXPECT_EQ(back.min_foreground, cfg.min_foreground);
  EXPECT_FALSE(back.tile_source.auth_token.has_value());
}

TEST(Config, LoadFromFileResolvesAgainstItsDirectory) {
  testing::TempDir dir("config");
  atomic_write(dir.path() / "run.ini", std::string_view("[dirs]\nout = results\n"));
  const PipelineConfig cfg = load_config(dir.path() / "run.ini");
  EXPECT_EQ(cfg.out_dir, dir.path() / "results");
  EXPECT_THROW(load_config(dir.path() / "missing.ini"), ConfigError);
}

}  // namespace
}  // namespace footpath
