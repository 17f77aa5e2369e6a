#include "footpath/metrics.hpp"

#include <algorithm>
#include <iterator>

#include <nlohmann/json.hpp>

#include "footpath/errors.hpp"
#include "footpath/geojson.hpp"
#include "footpath/parallel.hpp"
#include "footpath/tile_tree.hpp"

namespace footpath {

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// With no foreground in either mask there is nothing to miss and nothing
// wrongly found: precision, recall and f1 are all 1.
bool nothing_to_score(const ConfusionCounts& c) { return c.tp + c.fp + c.fn == 0; }

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw DomainError("confusion: mask dimensions differ");
  }
  // Index by (pred << 1 | gt): 0 = tn, 1 = fn, 2 = fp, 3 = tp.
  std::uint64_t bins[4] = {0, 0, 0, 0};
  const auto p = pred.cells();
  const auto g = gt.cells();
  for (std::size_t i = 0; i < p.size(); ++i) ++bins[(p[i] << 1) | g[i]];
  return {bins[3], bins[2], bins[1], bins[0]};
}

double precision(const ConfusionCounts& c) { return nothing_to_score(c) ? 1.0 : ratio(c.tp, c.tp + c.fp); }
double recall(const ConfusionCounts& c) { return nothing_to_score(c) ? 1.0 : ratio(c.tp, c.tp + c.fn); }

double f1(const ConfusionCounts& c) {
  if (nothing_to_score(c)) return 1.0;
  const double p = precision(c);
  const double r = recall(c);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

double iou(const ConfusionCounts& c, SegClass cls) {
  const std::uint64_t hit = cls == SegClass::kForeground ? c.tp : c.tn;
  const std::uint64_t uni = hit + c.fp + c.fn;
  return uni == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(uni);
}

double miou(const ConfusionCounts& c) {
  return (iou(c, SegClass::kForeground) + iou(c, SegClass::kBackground)) / 2.0;
}

EvalReport make_report(const ConfusionCounts& total, std::size_t n_images) {
  EvalReport r;
  r.counts = total;
  r.n_images = n_images;
  r.precision = precision(total);
  r.recall = recall(total);
  r.f1 = f1(total);
  r.iou_foreground = iou(total, SegClass::kForeground);
  r.iou_background = iou(total, SegClass::kBackground);
  r.miou = miou(total);
  return r;
}

EvalReport evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            const EvalOptions& options) {
  if (!std::filesystem::is_directory(pred_dir)) throw MissingInputError("prediction directory " + pred_dir.string() + " not found");
  if (!std::filesystem::is_directory(gt_dir)) throw MissingInputError("ground-truth directory " + gt_dir.string() + " not found");
  const std::vector<TileId> pred = list_tile_tree(pred_dir);
  const std::vector<TileId> gt = list_tile_tree(gt_dir);
  std::vector<TileId> both;
  std::set_intersection(pred.begin(), pred.end(), gt.begin(), gt.end(), std::back_inserter(both));

  std::vector<ConfusionCounts> counts(both.size());
  parallel_for(both.size(), options.threads, [&](std::size_t i) {
    const BinaryMask p = read_mask(tile_path(pred_dir, both[i]));
    const BinaryMask g = read_mask(tile_path(gt_dir, both[i]));
    counts[i] = confusion(p, g);
  });

  ConfusionCounts total;
  for (const ConfusionCounts& c : counts) total += c;
  EvalReport r = make_report(total, both.size());
  r.missing_ground_truth = pred.size() - both.size();
  r.missing_prediction = gt.size() - both.size();
  if (options.keep_per_image) {
    r.per_image.reserve(both.size());
    for (std::size_t i = 0; i < both.size(); ++i) r.per_image.push_back({both[i], counts[i]});
  }
  return r;
}

std::string format_report_text(const EvalReport& r) {
  std::string s;
  s += "aggregation      micro (pixel counts summed over images)\n";
  s += "images           " + std::to_string(r.n_images) + "\n";
  s += "precision        " + format_fixed(r.precision, 6) + "\n";
  s += "recall           " + format_fixed(r.recall, 6) + "\n";
  s += "f1               " + format_fixed(r.f1, 6) + "\n";
  s += "iou_foreground   " + format_fixed(r.iou_foreground, 6) + "\n";
  s += "iou_background   " + format_fixed(r.iou_background, 6) + "\n";
  s += "miou             " + format_fixed(r.miou, 6) + "\n";
  s += "tp/fp/fn/tn      " + std::to_string(r.counts.tp) + " " + std::to_string(r.counts.fp) + " " +
       std::to_string(r.counts.fn) + " " + std::to_string(r.counts.tn) + "\n";
  if (r.missing_prediction || r.missing_ground_truth) {
    s += "warnings         " + std::to_string(r.missing_prediction) + " tile(s) without prediction, " +
         std::to_string(r.missing_ground_truth) + " without ground truth (excluded)\n";
  }
  return s;
}

std::string format_report_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["aggregation"] = "micro";
  j["n_images"] = r.n_images;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  j["f1"] = r.f1;
  j["iou_foreground"] = r.iou_foreground;
  j["iou_background"] = r.iou_background;
  j["miou"] = r.miou;
  j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}};
  j["missing_prediction"] = r.missing_prediction;
  j["missing_ground_truth"] = r.missing_ground_truth;
  return j.dump(2) + "\n";
}

std::string format_per_image_csv(const EvalReport& r) {
  std::string s = "tile,tp,fp,fn,tn,precision,recall,f1,iou_foreground,iou_background,miou\n";
  for (const ImageEval& e : r.per_image) {
    const ConfusionCounts& c = e.counts;
    s += to_string(e.tile) + "," + std::to_string(c.tp) + "," + std::to_string(c.fp) + "," + std::to_string(c.fn) +
         "," + std::to_string(c.tn) + "," + format_fixed(precision(c), 6) + "," + format_fixed(recall(c), 6) + "," +
         format_fixed(f1(c), 6) + "," + format_fixed(iou(c, SegClass::kForeground), 6) + "," +
         format_fixed(iou(c, SegClass::kBackground), 6) + "," + format_fixed(miou(c), 6) + "\n";
  }
  return s;
}

}  // namespace footpath
