#include "footpath/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "footpath/errors.hpp"
#include "footpath/geojson.hpp"
#include "footpath/parallel.hpp"
#include "footpath/tile_tree.hpp"
#include "footpath/vectorizer.hpp"

namespace footpath {

namespace fs = std::filesystem;

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& add(std::span<const std::uint8_t> data) {
    EVP_DigestUpdate(ctx_, data.data(), data.size());
    return *this;
  }
  // Length-prefixed so that consecutive fields cannot run into each other.
  Sha256& add(std::string_view s) {
    const std::uint64_t n = s.size();
    EVP_DigestUpdate(ctx_, &n, sizeof n);
    EVP_DigestUpdate(ctx_, s.data(), s.size());
    return *this;
  }
  Sha256& add_file(const fs::path& p) {
    std::error_code ec;
    if (!fs::is_regular_file(p, ec)) return add("<absent>");
    const Bytes bytes = read_file(p);
    add(std::to_string(bytes.size()));
    return add(bytes);
  }
  Sha256& add_tree(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) return add("<absent>");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
      add(f.lexically_relative(root).generic_string());
      add_file(f);
    }
    return *this;
  }

  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 15]);
    }
    return out;
  }

 private:
  EVP_MD_CTX* ctx_;
};

void require(bool present, const char* key) {
  if (!present) throw ConfigError(std::string("this stage needs ") + key + " in the config");
}

std::vector<TileId> region_tiles(const PipelineConfig& cfg) { return tiles_in_bbox(*cfg.region, cfg.zoom); }

std::string region_key(const PipelineConfig& cfg) {
  const BBox& b = *cfg.region;
  return format_fixed(b.west, 12) + "," + format_fixed(b.south, 12) + "," + format_fixed(b.east, 12) + "," +
         format_fixed(b.north, 12) + "@" + std::to_string(cfg.zoom);
}

Sha256& add_region_files(Sha256& h, const PipelineConfig& cfg, const fs::path& root) {
  for (const TileId& t : region_tiles(cfg)) {
    h.add(to_string(t));
    h.add_file(tile_path(root, t));
  }
  return h;
}

struct Stage {
  const char* name;
  std::function<bool()> configured;
  std::function<std::string()> inputs;
  std::function<std::string()> outputs;
  std::function<void()> run;
};

}  // namespace

std::size_t run_fetch(const PipelineConfig& cfg, std::shared_ptr<Transport> transport, std::ostream& log) {
  if (!cfg.region) {
    log << "fetch: no region configured, nothing to fetch\n";
    return 0;
  }
  require(!cfg.tile_source.url_template.empty(), "tile_source.url_template");
  require(!cfg.cache_dir.empty(), "dirs.cache");
  if (!transport) transport = std::make_shared<HttpTransport>();
  const TileClient client(cfg.tile_source, cfg.cache_dir, std::move(transport));
  const std::size_t n = region_tiles(cfg).size();
  log << "fetch: " << n << " tile(s) at z=" << cfg.zoom << " into " << cfg.cache_dir.string() << "\n";
  const std::vector<TileId> fetched = client.fetch_region(*cfg.region, cfg.zoom);
  log << "fetch: " << fetched.size() << " tile(s) cached\n";
  return fetched.size();
}

std::size_t run_build_masks(const PipelineConfig& cfg, std::ostream& log) {
  require(!cfg.network.empty(), "network.path");
  require(cfg.region.has_value(), "region");
  require(!cfg.masks_gt_dir.empty(), "dirs.masks_gt");
  const VectorNetwork network = load_network(cfg.network);
  const std::vector<TileId> tiles = region_tiles(cfg);
  log << "build-masks: " << network.polygons.size() << " polygon(s) over " << tiles.size() << " tile(s)\n";
  const std::size_t n = build_mask_dataset(network, tiles, cfg.masks_gt_dir, {cfg.threads});
  log << "build-masks: " << n << " mask(s) written to " << cfg.masks_gt_dir.string() << "\n";
  return n;
}

DatasetSplit run_split(const PipelineConfig& cfg, std::ostream& log) {
  require(!cfg.masks_gt_dir.empty(), "dirs.masks_gt");
  require(!cfg.out_dir.empty(), "dirs.out");
  if (!fs::is_directory(cfg.masks_gt_dir)) {
    throw MissingInputError("ground-truth masks not found at " + cfg.masks_gt_dir.string());
  }
  std::vector<TileId> tiles = list_tile_tree(cfg.masks_gt_dir);
  if (cfg.min_foreground > 0) {
    std::vector<char> keep(tiles.size(), 0);
    parallel_for(tiles.size(), cfg.threads, [&](std::size_t i) {
      keep[i] = read_mask(tile_path(cfg.masks_gt_dir, tiles[i])).count() >= cfg.min_foreground;
    });
    std::size_t kept = 0;
    for (std::size_t i = 0; i < tiles.size(); ++i) {
      if (keep[i]) tiles[kept++] = tiles[i];
    }
    log << "split: " << kept << " of " << tiles.size() << " tile(s) have at least " << cfg.min_foreground
        << " foreground pixel(s)\n";
    tiles.resize(kept);
  }
  DatasetSplit split = split_dataset(tiles, cfg.seed, cfg.n_train, cfg.n_val);
  const OutputLayout out{cfg.out_dir};
  atomic_write(out.split_manifest(), format_split_manifest(split));
  log << "split: " << split.train.size() << " train, " << split.val.size() << " val, " << split.test.size()
      << " test (seed " << cfg.seed << ")\n";
  return split;
}

std::size_t run_vectorize(const PipelineConfig& cfg, std::ostream& log) {
  require(!cfg.masks_pred_dir.empty(), "dirs.masks_pred");
  require(!cfg.out_dir.empty(), "dirs.out");
  if (!fs::is_directory(cfg.masks_pred_dir)) {
    throw MissingInputError("prediction masks not found at " + cfg.masks_pred_dir.string() +
                            "; run inference to populate it");
  }
  const std::vector<TileId> tiles = list_tile_tree(cfg.masks_pred_dir);
  const OutputLayout out{cfg.out_dir};
  fs::remove_all(out.tiles());
  fs::create_directories(out.tiles());
  std::atomic<std::size_t> with_foreground{0};
  parallel_for(tiles.size(), cfg.threads, [&](std::size_t i) {
    const TileId& t = tiles[i];
    const BinaryMask mask = read_mask(tile_path(cfg.masks_pred_dir, t));
    FeatureCollection fc;
    for (GeoPolygon& p : vectorize_tile(mask, t, 0.0)) {
      const double area = polygon_area_m2(p, t.z);
      fc.features.push_back({std::move(p), {t}, area});
    }
    if (fc.features.empty()) return;
    write_geojson(fc, tile_path(out.tiles(), t, ".geojson"));
    ++with_foreground;
  });
  log << "vectorize: " << tiles.size() << " mask(s), " << with_foreground << " with foreground\n";
  return tiles.size();
}

std::size_t run_assemble(const PipelineConfig& cfg, std::ostream& log) {
  require(!cfg.out_dir.empty(), "dirs.out");
  const OutputLayout out{cfg.out_dir};
  if (!fs::is_directory(out.tiles())) {
    throw MissingInputError("per-tile polygons not found at " + out.tiles().string() + "; run vectorize first");
  }
  std::map<TileId, std::vector<GeoPolygon>> per_tile;
  for (const TileId& t : list_tile_tree(out.tiles(), ".geojson")) {
    const Bytes bytes = read_file(tile_path(out.tiles(), t, ".geojson"));
    per_tile[t] = parse_geojson_polygons(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  const FeatureCollection fc = merge_tiles(per_tile, cfg.tol_px);
  const std::size_t bytes = write_geojson(fc, out.geojson());
  log << "assemble: " << per_tile.size() << " tile(s) -> " << fc.features.size() << " feature(s), " << bytes
      << " bytes in " << out.geojson().string() << "\n";
  return fc.features.size();
}

EvalReport run_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  require(!cfg.masks_pred_dir.empty(), "dirs.masks_pred");
  require(!cfg.masks_gt_dir.empty(), "dirs.masks_gt");
  require(!cfg.out_dir.empty(), "dirs.out");
  const EvalReport r = evaluate_dataset(cfg.masks_pred_dir, cfg.masks_gt_dir, {cfg.threads, cfg.per_image_csv});
  const OutputLayout out{cfg.out_dir};
  atomic_write(out.metrics(), format_report_json(r));
  if (cfg.per_image_csv) atomic_write(out.per_image(), format_per_image_csv(r));
  log << "evaluate: " << r.n_images << " image pair(s) scored into " << out.metrics().string() << "\n";
  return r;
}

std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, std::shared_ptr<Transport> transport,
                                       std::ostream& log) {
  require(!cfg.out_dir.empty(), "dirs.out");
  const OutputLayout out{cfg.out_dir};
  const bool has_gt = !cfg.masks_gt_dir.empty();
  const bool has_pred = !cfg.masks_pred_dir.empty();

  const std::vector<Stage> stages = {
      {"fetch", [&] { return cfg.region && !cfg.tile_source.url_template.empty() && !cfg.cache_dir.empty(); },
       [&] { return Sha256().add(cfg.tile_source.url_template).add(region_key(cfg)).hex(); },
       [&] {
         Sha256 h;
         return add_region_files(h, cfg, cfg.cache_dir).hex();
       },
       [&] { run_fetch(cfg, transport, log); }},
      {"build-masks", [&] { return cfg.region && !cfg.network.empty() && has_gt; },
       [&] { return Sha256().add_file(cfg.network).add(region_key(cfg)).hex(); },
       [&] {
         Sha256 h;
         return add_region_files(h, cfg, cfg.masks_gt_dir).hex();
       },
       [&] { run_build_masks(cfg, log); }},
      {"split", [&] { return has_gt; },
       [&] {
         Sha256 h;
         if (cfg.min_foreground > 0) {
           h.add_tree(cfg.masks_gt_dir);
         } else {
           for (const TileId& t : list_tile_tree(cfg.masks_gt_dir)) h.add(to_string(t));
         }
         h.add(std::to_string(cfg.seed)).add(std::to_string(cfg.n_train)).add(std::to_string(cfg.n_val));
         return h.add(std::to_string(cfg.min_foreground)).hex();
       },
       [&] { return Sha256().add_file(out.split_manifest()).hex(); }, [&] { run_split(cfg, log); }},
      {"vectorize", [&] { return has_pred; }, [&] { return Sha256().add_tree(cfg.masks_pred_dir).hex(); },
       [&] { return Sha256().add_tree(out.tiles()).hex(); }, [&] { run_vectorize(cfg, log); }},
      {"assemble", [&] { return has_pred; },
       [&] { return Sha256().add_tree(out.tiles()).add(format_fixed(cfg.tol_px, 12)).hex(); },
       [&] { return Sha256().add_file(out.geojson()).hex(); }, [&] { run_assemble(cfg, log); }},
      {"evaluate", [&] { return has_pred && has_gt; },
       [&] {
         return Sha256().add_tree(cfg.masks_pred_dir).add_tree(cfg.masks_gt_dir).add(cfg.per_image_csv ? "1" : "0").hex();
       },
       [&] { return Sha256().add_file(out.metrics()).add_file(out.per_image()).hex(); },
       [&] { run_evaluate(cfg, log); }},
  };

  nlohmann::json manifest = nlohmann::json::object();
  if (fs::is_regular_file(out.stage_manifest())) {
    const Bytes bytes = read_file(out.stage_manifest());
    manifest = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
    if (!manifest.is_object()) manifest = nlohmann::json::object();
  }

  std::vector<StageOutcome> outcomes;
  for (const Stage& stage : stages) {
    if (!stage.configured()) {
      outcomes.push_back({stage.name, StageOutcome::Status::kNotConfigured});
      continue;
    }
    const std::string inputs = stage.inputs();
    const nlohmann::json& prev = manifest.contains(stage.name) ? manifest[stage.name] : nlohmann::json();
    if (prev.is_object() && prev.value("inputs", "") == inputs && prev.value("outputs", "") == stage.outputs()) {
      log << stage.name << ": up to date\n";
      outcomes.push_back({stage.name, StageOutcome::Status::kUpToDate});
      continue;
    }
    stage.run();
    manifest[stage.name] = {{"inputs", inputs}, {"outputs", stage.outputs()}};
    atomic_write(out.stage_manifest(), manifest.dump(2) + "\n");
    outcomes.push_back({stage.name, StageOutcome::Status::kRan});
  }
  return outcomes;
}

void write_effective_config(const PipelineConfig& cfg) {
  if (cfg.out_dir.empty()) return;
  atomic_write(OutputLayout{cfg.out_dir}.effective_config(), format_config(cfg));
}

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const GeometryError*>(&e)) return 4;
  if (dynamic_cast<const TransportError*>(&e) || dynamic_cast<const ServerError*>(&e)) return 3;
  if (dynamic_cast<const MissingInputError*>(&e) || dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const FormatError*>(&e)) {
    return 2;
  }
  return 1;
}

}  // namespace footpath
