#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "footpath/geo_tiles.hpp"
#include "footpath/raster.hpp"

namespace footpath {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }
  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

enum class SegClass { kForeground, kBackground };

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

// Ratios with the zero-division conventions: precision/recall/f1 are 0 when
// their denominator is 0 while errors exist, and 1 when neither mask has any
// foreground; a class absent from both masks has IoU 1.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);
double iou(const ConfusionCounts& c, SegClass cls);
double miou(const ConfusionCounts& c);

struct ImageEval {
  TileId tile;
  ConfusionCounts counts;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double iou_foreground = 0.0;
  double iou_background = 0.0;
  double miou = 0.0;
  std::size_t n_images = 0;
  ConfusionCounts counts;
  // Tiles present in only one of the two trees; excluded from the totals.
  std::size_t missing_prediction = 0;
  std::size_t missing_ground_truth = 0;
  std::vector<ImageEval> per_image;
};

// Micro-averaged: counts are summed over all matched tiles, then the ratios
// are computed once.
EvalReport make_report(const ConfusionCounts& total, std::size_t n_images);

struct EvalOptions {
  int threads = 1;
  bool keep_per_image = false;
};

EvalReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            const EvalOptions& options = {});

std::string format_report_text(const EvalReport& r);
std::string format_report_json(const EvalReport& r);
std::string format_per_image_csv(const EvalReport& r);

}  // namespace footpath
