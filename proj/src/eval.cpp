#include "simpaste/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "simpaste/errors.hpp"

namespace simpaste::eval {

double iou(const Box& a, const Box& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

double iou(const BBox& a, const BBox& b) { return iou(Box::from(a), Box::from(b)); }

namespace {

std::vector<std::size_t> confidence_order(std::span<const Detection> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].confidence > preds[b].confidence; });
  return order;
}

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

MatchResult match_detections(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh) {
  MatchResult r;
  r.pred_is_tp.assign(preds.size(), false);
  std::vector<bool> gt_taken(gts.size(), false);
  for (std::size_t p : confidence_order(preds)) {
    double best = -1.0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g]) continue;
      const double v = iou(preds[p].box, gts[g]);
      if (v >= iou_thresh && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      gt_taken[best_gt] = true;
      r.pred_is_tp[p] = true;
      r.pairs.push_back({p, best_gt, best});
      ++r.tp;
    } else {
      ++r.fp;
    }
  }
  r.fn = gts.size() - r.tp;
  return r;
}

double f1_score(double precision, double recall) {
  const double sum = precision + recall;
  if (sum <= 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

PrfScores pr_f1_at(std::span<const ImageSample> samples, double iou_thresh, double conf_thresh) {
  PrfScores s;
  std::vector<Detection> kept;
  for (const auto& img : samples) {
    kept.clear();
    for (const auto& d : img.preds)
      if (d.confidence >= conf_thresh) kept.push_back(d);
    const MatchResult m = match_detections(kept, img.gts, iou_thresh);
    s.tp += m.tp;
    s.fp += m.fp;
    s.fn += m.fn;
  }
  s.precision = safe_ratio(s.tp, s.tp + s.fp);
  s.recall = safe_ratio(s.tp, s.tp + s.fn);
  s.f1 = f1_score(s.precision, s.recall);
  return s;
}

PrfScores pr_f1_at(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh,
                   double conf_thresh) {
  const ImageSample one{{preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return pr_f1_at(std::span<const ImageSample>(&one, 1), iou_thresh, conf_thresh);
}

namespace {

struct Ranked {
  double confidence;
  bool tp;
};

// Pooled predictions in rank order plus the ground-truth total.
std::pair<std::vector<Ranked>, std::size_t> rank_predictions(std::span<const ImageSample> samples,
                                                            double iou_thresh) {
  std::vector<Ranked> ranked;
  std::size_t n_gt = 0;
  for (const auto& img : samples) {
    const MatchResult m = match_detections(img.preds, img.gts, iou_thresh);
    for (std::size_t i = 0; i < img.preds.size(); ++i) ranked.push_back({img.preds[i].confidence, m.pred_is_tp[i]});
    n_gt += img.gts.size();
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });
  return {std::move(ranked), n_gt};
}

std::vector<PrPoint> curve_from(const std::vector<Ranked>& ranked, std::size_t n_gt) {
  std::vector<PrPoint> curve;
  curve.reserve(ranked.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (ranked[i].tp) ++tp;
    curve.push_back({safe_ratio(tp, n_gt), safe_ratio(tp, i + 1), ranked[i].confidence});
  }
  return curve;
}

}  // namespace

std::vector<PrPoint> pr_curve(std::span<const ImageSample> samples, double iou_thresh) {
  const auto [ranked, n_gt] = rank_predictions(samples, iou_thresh);
  return curve_from(ranked, n_gt);
}

double average_precision(std::span<const ImageSample> samples, double iou_thresh, ApMode mode) {
  const auto [ranked, n_gt] = rank_predictions(samples, iou_thresh);
  if (n_gt == 0 || ranked.empty()) return 0.0;
  const std::vector<PrPoint> curve = curve_from(ranked, n_gt);

  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }

  if (mode == ApMode::kAllPoints) {
    // Recall steps by exactly 1/n_gt at each true positive, so the area is
    // the envelope summed over true positives divided once by n_gt.
    double area = 0.0;
    for (std::size_t i = 0; i < ranked.size(); ++i)
      if (ranked[i].tp) area += envelope[i];
    return area / static_cast<double>(n_gt);
  }

  double sum = 0.0;
  std::size_t i = 0;
  for (int t = 0; t <= 100; ++t) {
    const double r = t / 100.0;
    while (i < curve.size() && curve[i].recall < r) ++i;
    if (i < curve.size()) sum += envelope[i];
  }
  return sum / 101.0;
}

double average_precision(std::span<const Detection> preds, std::span<const Box> gts, double iou_thresh,
                         ApMode mode) {
  const ImageSample one{{preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return average_precision(std::span<const ImageSample>(&one, 1), iou_thresh, mode);
}

std::array<double, 10> coco_iou_thresholds() {
  std::array<double, 10> t{};
  for (int k = 0; k < 10; ++k) t[static_cast<std::size_t>(k)] = (50 + 5 * k) / 100.0;
  return t;
}

MapScores map_suite(std::span<const ImageSample> samples, ApMode mode) {
  MapScores s;
  const auto thresholds = coco_iou_thresholds();
  double sum = 0.0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    s.ap_per_threshold[k] = average_precision(samples, thresholds[k], mode);
    sum += s.ap_per_threshold[k];
  }
  s.map50 = s.ap_per_threshold[0];
  s.map50_95 = sum / 10.0;
  return s;
}

MapScores map_suite(std::span<const Detection> preds, std::span<const Box> gts, ApMode mode) {
  const ImageSample one{{preds.begin(), preds.end()}, {gts.begin(), gts.end()}};
  return map_suite(std::span<const ImageSample>(&one, 1), mode);
}

EvalReport evaluate(std::span<const ImageSample> samples, const EvalOptions& options) {
  EvalReport r;
  r.options = options;
  r.images = samples.size();
  const PrfScores prf = pr_f1_at(samples, options.iou_thresh, options.conf_thresh);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  r.tp = prf.tp;
  r.fp = prf.fp;
  r.fn = prf.fn;
  const MapScores m = map_suite(samples, options.ap_mode);
  r.map50 = m.map50;
  r.map50_95 = m.map50_95;
  r.ap_per_threshold = m.ap_per_threshold;
  r.pr_curve50 = pr_curve(samples, 0.5);
  return r;
}

std::string report_json(const EvalReport& report, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["images"] = report.images;
  j["conf_thresh"] = report.options.conf_thresh;
  j["iou_thresh"] = report.options.iou_thresh;
  j["ap_mode"] = report.options.ap_mode == ApMode::kAllPoints ? "all-points" : "101-point";
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["map50"] = report.map50;
  j["map50_95"] = report.map50_95;
  j["counts"] = {{"tp", report.tp}, {"fp", report.fp}, {"fn", report.fn}};
  const auto thresholds = coco_iou_thresholds();
  j["ap_per_iou"] = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    j["ap_per_iou"].push_back({{"iou", thresholds[k]}, {"ap", report.ap_per_threshold[k]}});
  j["pr_curve_iou50"] = nlohmann::ordered_json::array();
  for (const auto& p : report.pr_curve50)
    j["pr_curve_iou50"].push_back({{"confidence", p.confidence}, {"recall", p.recall}, {"precision", p.precision}});
  return j.dump(2) + "\n";
}

std::string report_table(const EvalReport& report, const std::string& row_name) {
  const std::size_t name_w = std::max<std::size_t>(row_name.size(), 8);
  char buf[256];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-*s  %9s  %9s  %9s  %9s  %9s\n", static_cast<int>(name_w), "Run", "Precision",
                "Recall", "F1", "mAP50", "mAP50-95");
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s  %9.3f  %9.3f  %9.3f  %9.3f  %9.3f\n", static_cast<int>(name_w),
                row_name.c_str(), report.precision, report.recall, report.f1, report.map50, report.map50_95);
  out += buf;
  return out;
}

std::vector<Detection> parse_prediction_text(const std::string& text, double image_width, double image_height) {
  std::vector<Detection> out;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    Detection d;
    double cx, cy, w, h;
    std::string extra;
    if (!(fields >> d.class_id >> d.confidence >> cx >> cy >> w >> h) || (fields >> extra))
      throw EncodingError("malformed prediction line " + std::to_string(lineno) + ": '" + line + "'");
    if (d.confidence < 0.0 || d.confidence > 1.0)
      throw EncodingError("confidence outside [0, 1] on line " + std::to_string(lineno));
    d.box = {(cx - 0.5 * w) * image_width, (cy - 0.5 * h) * image_height, w * image_width, h * image_height};
    out.push_back(d);
  }
  return out;
}

}  // namespace simpaste::eval
