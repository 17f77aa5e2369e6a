#include "footpath/tile_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <mutex>
#include <thread>

#include "footpath/parallel.hpp"
#include "footpath/tile_tree.hpp"

namespace footpath {

namespace {

std::size_t count_of(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + needle.size())) ++n;
  return n;
}

void replace_once(std::string* s, const std::string& needle, const std::string& value) {
  const std::size_t pos = s->find(needle);
  s->replace(pos, needle.size(), value);
}

std::string percent_encode(const std::string& s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

bool retryable(int status) { return status == 429 || (status >= 500 && status < 600); }

std::optional<RgbImage> read_cached(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    RgbImage img = decode_image(read_file(path));
    if (img.width == kTileSize && img.height == kTileSize) return img;
  } catch (const Error&) {
    // Unreadable entries are refetched and overwritten.
  }
  return std::nullopt;
}

}  // namespace

void validate(const TileSource& src) {
  for (const char* p : {"{z}", "{x}", "{y}"}) {
    if (count_of(src.url_template, p) != 1) {
      throw ConfigError(std::string("url template must contain ") + p + " exactly once");
    }
  }
  if (src.max_parallel < 1) throw ConfigError("max_parallel must be at least 1");
  if (src.retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
}

std::string tile_url(const TileSource& src, const TileId& t) {
  std::string url = src.url_template;
  replace_once(&url, "{z}", std::to_string(t.z));
  replace_once(&url, "{x}", std::to_string(t.x));
  replace_once(&url, "{y}", std::to_string(t.y));
  if (src.auth_token && !src.auth_token->empty()) {
    url += url.find('?') == std::string::npos ? '?' : '&';
    url += "key=" + percent_encode(*src.auth_token);
  }
  return url;
}

HttpResponse HttpTransport::get(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw TransportError("malformed URL " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  if (!client.is_valid()) throw TransportError("unsupported URL " + url);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) throw TransportError("GET " + url + " failed: " + httplib::to_string(res.error()));
  HttpResponse out;
  out.status = res->status;
  out.body.assign(res->body.begin(), res->body.end());
  return out;
}

RegionFetchError::RegionFetchError(std::vector<TileId> fetched, std::vector<std::pair<TileId, std::string>> failures)
    : TransportError(std::to_string(failures.size()) + " tile(s) failed; first " + to_string(failures.front().first) +
                     ": " + failures.front().second),
      fetched_(std::move(fetched)),
      failures_(std::move(failures)) {}

TileClient::TileClient(TileSource source, std::filesystem::path cache_root, std::shared_ptr<Transport> transport,
                       Sleeper sleeper)
    : source_(std::move(source)),
      cache_root_(std::move(cache_root)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)) {
  validate(source_);
  if (!transport_) throw ConfigError("tile client needs a transport");
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RgbImage TileClient::download(const TileId& t) const {
  const std::string url = tile_url(source_, t);
  std::chrono::milliseconds backoff = kInitialBackoff;
  for (int attempt = 0;; ++attempt) {
    const bool last = attempt >= source_.retry_limit;
    HttpResponse res;
    try {
      res = transport_->get(url);
    } catch (const TransportError&) {
      if (last) throw;
      sleeper_(backoff);
      backoff *= 2;
      continue;
    }
    if (res.status == 200) {
      RgbImage img = decode_image(res.body);
      if (img.width != kTileSize || img.height != kTileSize) {
        throw FormatError("tile " + to_string(t) + " is " + std::to_string(img.width) + "x" +
                          std::to_string(img.height) + ", expected 256x256");
      }
      return img;
    }
    if (!retryable(res.status) || last) throw ServerError(res.status, url);
    sleeper_(backoff);
    backoff *= 2;
  }
}

TileImage TileClient::fetch_tile(const TileId& t) const {
  validate(t);
  const std::filesystem::path path = tile_path(cache_root_, t);
  if (auto cached = read_cached(path)) return {t, std::move(*cached)};
  RgbImage img = download(t);
  atomic_write(path, encode_rgb_png(img));
  return {t, std::move(img)};
}

std::vector<TileId> TileClient::fetch_region(const BBox& bbox, int z) const {
  const std::vector<TileId> tiles = tiles_in_bbox(bbox, z);
  std::vector<char> ok(tiles.size(), 0);
  std::mutex mutex;
  std::vector<std::pair<TileId, std::string>> failures;
  parallel_for(tiles.size(), source_.max_parallel, [&](std::size_t i) {
    try {
      fetch_tile(tiles[i]);
      ok[i] = 1;
    } catch (const Error& e) {
      std::lock_guard lock(mutex);
      failures.emplace_back(tiles[i], e.what());
    }
  });
  std::vector<TileId> fetched;
  for (std::size_t i = 0; i < tiles.size(); ++i) {
    if (ok[i]) fetched.push_back(tiles[i]);
  }
  if (!failures.empty()) {
    std::sort(failures.begin(), failures.end());
    throw RegionFetchError(std::move(fetched), std::move(failures));
  }
  return fetched;
}

}  // namespace footpath
