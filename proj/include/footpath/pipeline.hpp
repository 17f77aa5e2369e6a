#pragma once

#include <exception>
#include <filesystem>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "footpath/config.hpp"
#include "footpath/mask_dataset.hpp"
#include "footpath/metrics.hpp"
#include "footpath/network_assembler.hpp"
#include "footpath/tile_client.hpp"

namespace footpath {

// Files the stages write under dirs.out.
struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path tiles() const { return root / "tiles"; }  // per-tile {z}/{x}/{y}.geojson
  std::filesystem::path geojson() const { return root / "out.geojson"; }
  std::filesystem::path split_manifest() const { return root / "split.tsv"; }
  std::filesystem::path metrics() const { return root / "metrics.json"; }
  std::filesystem::path per_image() const { return root / "per_image.csv"; }
  std::filesystem::path effective_config() const { return root / "effective_config.ini"; }
  std::filesystem::path stage_manifest() const { return root / "pipeline_manifest.json"; }
};

// Each stage needs the config entries it reads (ConfigError otherwise) and
// reports progress to log.

// Caches every tile of the region; without a region there is nothing to
// fetch and the count is 0. A null transport means real HTTP.
std::size_t run_fetch(const PipelineConfig& cfg, std::shared_ptr<Transport> transport, std::ostream& log);

// Ground-truth masks for every tile of the region.
std::size_t run_build_masks(const PipelineConfig& cfg, std::ostream& log);

// Splits the tiles present in masks_gt (minus those under min_foreground) and
// writes split.tsv.
DatasetSplit run_split(const PipelineConfig& cfg, std::ostream& log);

// Vectorizes each prediction mask exactly (tol 0) into out/tiles, replacing
// whatever was there. Tiles without foreground produce no file. Returns the
// number of masks read; MissingInputError if masks_pred does not exist.
std::size_t run_vectorize(const PipelineConfig& cfg, std::ostream& log);

// Dissolves the per-tile polygons, simplifies with tol_px and writes
// out.geojson. Returns the number of features.
std::size_t run_assemble(const PipelineConfig& cfg, std::ostream& log);

// Scores masks_pred against masks_gt; writes metrics.json and, if enabled,
// per_image.csv.
EvalReport run_evaluate(const PipelineConfig& cfg, std::ostream& log);

struct StageOutcome {
  std::string stage;
  enum class Status { kRan, kUpToDate, kNotConfigured } status = Status::kRan;
};

// Runs every configured stage in order. A stage whose input digest and
// current output digest match the manifest from the previous run is skipped.
// The first failing stage aborts the run.
std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, std::shared_ptr<Transport> transport,
                                       std::ostream& log);

void write_effective_config(const PipelineConfig& cfg);

// 0 success, 1 usage or config, 2 missing or unreadable input, 3 transport,
// 4 geometry.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace footpath
