#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simpaste/mask_geometry.hpp"

namespace simpaste::eval {

/// Axis-aligned box in continuous coordinates (top-left corner + size).
struct Box {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  static Box from(const BBox& b) { return {double(b.x_min), double(b.y_min), double(b.width), double(b.height)}; }
};

struct Detection {
  int class_id = 0;
  Box box;
  double confidence = 0.0;
};

/// Predictions and ground truth of one image.
struct ImageSample {
  std::vector<Detection> preds;
  std::vector<Box> gts;
};

/// Intersection over union of continuous box areas; 0 when the union is empty.
double iou(const Box& a, const Box& b);
double iou(const BBox& a, const BBox& b);

struct MatchedPair {
  std::size_t pred = 0;
  std::size_t gt = 0;
  double iou = 0.0;
};

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::vector<MatchedPair> pairs;
  /// Indexed by input prediction order.
  std::vector<bool> pred_is_tp;
};

/// Greedy matching: predictions in descending confidence (ties keep input
/// order) each take the highest-IoU unmatched ground truth with
/// IoU >= iou_thresh. Ties in IoU go to the lower ground-truth index.
MatchResult match_detections(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh);

/// 2PR / (P + R); 0 when P + R == 0.
double f1_score(double precision, double recall);

struct PrfScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

/// Drops predictions below conf_thresh, matches per image and pools counts.
PrfScores pr_f1_at(std::span<const ImageSample> samples, double iou_thresh, double conf_thresh);
PrfScores pr_f1_at(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh,
                   double conf_thresh);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
  double confidence = 0.0;
};

/// One point per prediction, pooled over images in descending confidence
/// (ties by image, then input order).
std::vector<PrPoint> pr_curve(std::span<const ImageSample> samples, double iou_thresh);

enum class ApMode {
  kAllPoints,     // area under the monotone precision envelope
  kPoints101,     // mean envelope precision at recall 0, 0.01, ..., 1
};

/// Area under the interpolated precision-recall curve; 0 without ground truth.
double average_precision(std::span<const ImageSample> samples, double iou_thresh, ApMode mode = ApMode::kAllPoints);
double average_precision(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh,
                         ApMode mode = ApMode::kAllPoints);

/// IoU thresholds 0.50, 0.55, ..., 0.95.
std::array<double, 10> coco_iou_thresholds();

struct MapScores {
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::array<double, 10> ap_per_threshold{};
};

/// Single class: mAP equals AP.
MapScores map_suite(std::span<const ImageSample> samples, ApMode mode = ApMode::kAllPoints);
MapScores map_suite(std::span<const Detection> preds, std::span<const Box> gts, ApMode mode = ApMode::kAllPoints);

inline constexpr double kDefaultConfThresh = 0.25;
inline constexpr double kDefaultIouThresh = 0.3;

struct EvalOptions {
  double conf_thresh = kDefaultConfThresh;
  double iou_thresh = kDefaultIouThresh;
  ApMode ap_mode = ApMode::kAllPoints;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t images = 0;
  EvalOptions options;
  std::array<double, 10> ap_per_threshold{};
  /// PR samples at IoU 0.5 over all predictions.
  std::vector<PrPoint> pr_curve50;
};

/// P/R/F1 at (conf_thresh, iou_thresh); mAP over all predictions.
EvalReport evaluate(std::span<const ImageSample> samples, const EvalOptions& options = {});

std::string report_json(const EvalReport& report, std::uint64_t seed);
/// Aligned table with columns Precision, Recall, F1, mAP50, mAP50-95.
std::string report_table(const EvalReport& report, const std::string& row_name);

/// Parses `class conf cx cy w h` lines (normalized) into boxes scaled by the
/// image size. Throws EncodingError on malformed lines.
std::vector<Detection> parse_prediction_text(const std::string& text, double image_width = 1.0,
                                             double image_height = 1.0);

}  // namespace simpaste::eval
