#include "footpath/tile_tree.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace footpath {

namespace {

bool parse_index(const std::string& s, std::int64_t* out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), *out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::filesystem::path tile_path(const std::filesystem::path& root, const TileId& t, const char* ext) {
  return root / std::to_string(t.z) / std::to_string(t.x) / (std::to_string(t.y) + ext);
}

std::vector<TileId> list_tile_tree(const std::filesystem::path& root, const char* ext) {
  namespace fs = std::filesystem;
  std::vector<TileId> out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return out;
  const std::string suffix = ext;
  for (const auto& zdir : fs::directory_iterator(root)) {
    std::int64_t z = 0;
    if (!zdir.is_directory() || !parse_index(zdir.path().filename().string(), &z)) continue;
    for (const auto& xdir : fs::directory_iterator(zdir.path())) {
      std::int64_t x = 0;
      if (!xdir.is_directory() || !parse_index(xdir.path().filename().string(), &x)) continue;
      for (const auto& f : fs::directory_iterator(xdir.path())) {
        const std::string name = f.path().filename().string();
        if (!f.is_regular_file() || name.size() <= suffix.size() ||
            name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
          continue;
        }
        std::int64_t y = 0;
        if (!parse_index(name.substr(0, name.size() - suffix.size()), &y)) continue;
        const TileId t{x, y, static_cast<int>(z)};
        if (z <= kMaxZoom && is_valid(t)) out.push_back(t);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace footpath
