#include "footpath/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "footpath/errors.hpp"
#include "footpath/geojson.hpp"

namespace footpath {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"tile_source", {"url_template", "auth_token", "max_parallel", "retry_limit"}},
      {"region", {"west", "south", "east", "north", "zoom"}},
      {"dirs", {"cache", "masks_gt", "masks_pred", "out"}},
      {"network", {"path"}},
      {"vectorize", {"tol_px"}},
      {"split", {"seed", "n_train", "n_val", "min_foreground"}},
      {"metrics", {"per_image_csv"}},
      {"run", {"threads"}},
  };
  return keys;
}

void check_key(const std::string& section, const std::string& key) {
  const auto& keys = known_keys();
  const auto it = keys.find(section);
  if (it == keys.end()) throw ConfigError("unknown config section [" + section + "]");
  if (!it->second.contains(key)) throw ConfigError("unknown config key " + section + "." + key);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> text(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(path)) return *v;
    return std::nullopt;
  }

  template <typename T>
  std::optional<T> number(const std::string& path) const {
    const auto s = text(path);
    if (!s) return std::nullopt;
    T v{};
    const char* end = s->data() + s->size();
    const auto [ptr, ec] = std::from_chars(s->data(), end, v);
    if (ec != std::errc() || ptr != end) throw ConfigError(path + ": invalid number '" + *s + "'");
    return v;
  }

  std::optional<bool> flag(const std::string& path) const {
    const auto s = text(path);
    if (!s) return std::nullopt;
    if (*s == "true" || *s == "1" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "no") return false;
    throw ConfigError(path + ": expected true or false, got '" + *s + "'");
  }

  std::filesystem::path dir(const std::string& path, const std::filesystem::path& base) const {
    const auto s = text(path);
    if (!s || s->empty()) return {};
    return std::filesystem::absolute(base / *s).lexically_normal();
  }

 private:
  const pt::ptree& tree_;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                            const ConfigOverrides& overrides, const char* env_token) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !known_keys().contains(section)) {
      throw ConfigError("config: '" + section + "' is not a known section");
    }
    for (const auto& [key, value] : body) check_key(section, key);
  }
  if (env_token && *env_token) tree.put("tile_source.auth_token", env_token);
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw ConfigError("override '" + path + "' must be section.key");
    check_key(path.substr(0, dot), path.substr(dot + 1));
    tree.put(path, value);
  }

  const Reader r(tree);
  PipelineConfig cfg;
  cfg.tile_source.url_template = r.text("tile_source.url_template").value_or("");
  if (auto tok = r.text("tile_source.auth_token"); tok && !tok->empty()) cfg.tile_source.auth_token = *tok;
  cfg.tile_source.max_parallel = r.number<int>("tile_source.max_parallel").value_or(cfg.tile_source.max_parallel);
  cfg.tile_source.retry_limit = r.number<int>("tile_source.retry_limit").value_or(cfg.tile_source.retry_limit);

  const auto west = r.number<double>("region.west");
  const auto south = r.number<double>("region.south");
  const auto east = r.number<double>("region.east");
  const auto north = r.number<double>("region.north");
  const int given = !!west + !!south + !!east + !!north;
  if (given == 4) {
    cfg.region = BBox{*west, *south, *east, *north};
  } else if (given != 0) {
    throw ConfigError("region needs all of west, south, east and north");
  }
  cfg.zoom = r.number<int>("region.zoom").value_or(cfg.zoom);

  cfg.cache_dir = r.dir("dirs.cache", base_dir);
  cfg.masks_gt_dir = r.dir("dirs.masks_gt", base_dir);
  cfg.masks_pred_dir = r.dir("dirs.masks_pred", base_dir);
  cfg.out_dir = r.dir("dirs.out", base_dir);
  cfg.network = r.dir("network.path", base_dir);

  cfg.tol_px = r.number<double>("vectorize.tol_px").value_or(cfg.tol_px);
  cfg.seed = r.number<std::uint64_t>("split.seed").value_or(cfg.seed);
  cfg.n_train = r.number<std::size_t>("split.n_train").value_or(cfg.n_train);
  cfg.n_val = r.number<std::size_t>("split.n_val").value_or(cfg.n_val);
  cfg.min_foreground = r.number<std::size_t>("split.min_foreground").value_or(cfg.min_foreground);
  cfg.per_image_csv = r.flag("metrics.per_image_csv").value_or(cfg.per_image_csv);
  cfg.threads = r.number<int>("run.threads").value_or(cfg.threads);

  validate(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides) {
  if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file " + path.string() + " not found");
  const Bytes bytes = read_file(path);
  const std::string text(bytes.begin(), bytes.end());
  const std::filesystem::path base = std::filesystem::absolute(path).parent_path();
  return parse_config(text, base, overrides, std::getenv("FOOTPATH_TILE_KEY"));
}

void validate(const PipelineConfig& cfg) {
  if (cfg.zoom < 0 || cfg.zoom > kMaxZoom) throw ConfigError("zoom must be in [0, 23]");
  if (!(cfg.tol_px >= 0.0)) throw ConfigError("tol_px must be non-negative");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  if (cfg.tile_source.max_parallel < 1) throw ConfigError("max_parallel must be at least 1");
  if (cfg.tile_source.retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
  if (!cfg.tile_source.url_template.empty()) validate(cfg.tile_source);
  if (cfg.region) {
    try {
      validate(*cfg.region);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("region: ") + e.what());
    }
  }
  const std::pair<const char*, const std::filesystem::path*> dirs[] = {
      {"cache", &cfg.cache_dir}, {"masks_gt", &cfg.masks_gt_dir}, {"masks_pred", &cfg.masks_pred_dir},
      {"out", &cfg.out_dir}};
  for (std::size_t i = 0; i < std::size(dirs); ++i) {
    for (std::size_t j = i + 1; j < std::size(dirs); ++j) {
      if (!dirs[i].second->empty() && *dirs[i].second == *dirs[j].second) {
        throw ConfigError(std::string("dirs.") + dirs[i].first + " and dirs." + dirs[j].first + " must differ");
      }
    }
  }
}

std::string format_config(const PipelineConfig& cfg) {
  std::string s;
  auto line = [&s](const std::string& key, const std::string& value) { s += key + " = " + value + "\n"; };
  s += "[tile_source]\n";
  line("url_template", cfg.tile_source.url_template);
  if (cfg.tile_source.auth_token) s += "; auth_token set, not echoed\n";
  line("max_parallel", std::to_string(cfg.tile_source.max_parallel));
  line("retry_limit", std::to_string(cfg.tile_source.retry_limit));
  s += "\n[region]\n";
  if (cfg.region) {
    line("west", fmt_double(cfg.region->west));
    line("south", fmt_double(cfg.region->south));
    line("east", fmt_double(cfg.region->east));
    line("north", fmt_double(cfg.region->north));
  }
  line("zoom", std::to_string(cfg.zoom));
  s += "\n[dirs]\n";
  line("cache", cfg.cache_dir.string());
  line("masks_gt", cfg.masks_gt_dir.string());
  line("masks_pred", cfg.masks_pred_dir.string());
  line("out", cfg.out_dir.string());
  s += "\n[network]\n";
  line("path", cfg.network.string());
  s += "\n[vectorize]\n";
  line("tol_px", fmt_double(cfg.tol_px));
  s += "\n[split]\n";
  line("seed", std::to_string(cfg.seed));
  line("n_train", std::to_string(cfg.n_train));
  line("n_val", std::to_string(cfg.n_val));
  line("min_foreground", std::to_string(cfg.min_foreground));
  s += "\n[metrics]\n";
  line("per_image_csv", cfg.per_image_csv ? "true" : "false");
  s += "\n[run]\n";
  line("threads", std::to_string(cfg.threads));
  return s;
}

}  // namespace footpath
