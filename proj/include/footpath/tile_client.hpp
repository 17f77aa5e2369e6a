#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "footpath/errors.hpp"
#include "footpath/geo_tiles.hpp"
#include "footpath/raster.hpp"

namespace footpath {

struct TileSource {
  std::string url_template;  // must contain {z}, {x} and {y} exactly once each
  std::optional<std::string> auth_token;
  int max_parallel = 4;
  int retry_limit = 3;
};

void validate(const TileSource& src);

// Substitutes the placeholders and appends the token as a `key` query parameter.
std::string tile_url(const TileSource& src, const TileId& t);

struct HttpResponse {
  int status = 0;
  Bytes body;
};

// One blocking GET. Implementations throw TransportError when no HTTP
// response could be obtained; any response, whatever its status, is returned.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(std::chrono::seconds timeout = std::chrono::seconds(30)) : timeout_(timeout) {}
  HttpResponse get(const std::string& url) override;

 private:
  std::chrono::seconds timeout_;
};

struct TileImage {
  TileId tile;
  RgbImage pixels;  // always 256×256
};

// Raised by fetch_region after every tile has been attempted. Tiles that
// succeeded are in the cache and listed in fetched().
class RegionFetchError : public TransportError {
 public:
  RegionFetchError(std::vector<TileId> fetched, std::vector<std::pair<TileId, std::string>> failures);
  const std::vector<TileId>& fetched() const noexcept { return fetched_; }
  const std::vector<std::pair<TileId, std::string>>& failures() const noexcept { return failures_; }

 private:
  std::vector<TileId> fetched_;
  std::vector<std::pair<TileId, std::string>> failures_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

// XYZ tile fetcher backed by a {cache_root}/{z}/{x}/{y}.png cache. Safe to
// share between threads; cache entries are written atomically.
class TileClient {
 public:
  static constexpr std::chrono::milliseconds kInitialBackoff{500};

  TileClient(TileSource source, std::filesystem::path cache_root, std::shared_ptr<Transport> transport,
             Sleeper sleeper = {});

  // Cache hit: no network. Miss: GET with retries (transport failures, 429 and
  // 5xx back off 500 ms, 1 s, 2 s, ...), then cache as RGB PNG.
  TileImage fetch_tile(const TileId& t) const;

  // Fetches every tile overlapping the box with at most max_parallel requests
  // in flight; returns the tiles sorted row-major.
  std::vector<TileId> fetch_region(const BBox& bbox, int z) const;

  const TileSource& source() const noexcept { return source_; }
  const std::filesystem::path& cache_root() const noexcept { return cache_root_; }

 private:
  RgbImage download(const TileId& t) const;

  TileSource source_;
  std::filesystem::path cache_root_;
  std::shared_ptr<Transport> transport_;
  Sleeper sleeper_;
};

}  // namespace footpath
