#include "obbreg/postprocess.hpp"

#include <algorithm>
#include <numeric>

#include "obbreg/geometry.hpp"

namespace obbreg {

EvalProtocol EvalProtocol::ap50() { return {{0.5}}; }
EvalProtocol EvalProtocol::ap75() { return {{0.75}}; }
EvalProtocol EvalProtocol::ap50_95() {
  EvalProtocol p;
  for (int i = 0; i < 10; ++i) p.iou_thresholds.push_back((50.0 + 5.0 * i) / 100.0);
  return p;
}

void validate_protocol(const EvalProtocol& protocol) {
  if (protocol.iou_thresholds.empty()) throw InvalidInput("protocol: no IoU thresholds");
  for (double t : protocol.iou_thresholds) {
    if (!(t > 0.0 && t < 1.0)) throw InvalidInput("protocol: IoU thresholds must lie in (0, 1)");
  }
}

std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

std::vector<std::size_t> rnms(std::span<const Detection> dets, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InvalidInput("rnms: iou_threshold must lie in (0, 1)");
  }
  const auto order = score_order(dets);
  std::vector<bool> suppressed(dets.size(), false);
  std::vector<std::size_t> kept;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t i = order[oi];
    if (suppressed[i]) continue;
    kept.push_back(i);
    for (std::size_t oj = oi + 1; oj < order.size(); ++oj) {
      const std::size_t j = order[oj];
      if (suppressed[j] || dets[j].class_id != dets[i].class_id) continue;
      if (rotated_iou(dets[i].quad, dets[j].quad) >= iou_threshold) suppressed[j] = true;
    }
  }
  return kept;
}

double ap_from_matches(std::span<const std::uint8_t> is_tp, std::size_t num_gts) {
  if (num_gts == 0 || is_tp.empty()) return 0.0;
  const std::size_t n = is_tp.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (is_tp[k]) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(num_gts);
  }
  for (std::size_t k = n - 1; k-- > 0;) precision[k] = std::max(precision[k], precision[k + 1]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    ap += (recall[k] - prev_recall) * precision[k];
    prev_recall = recall[k];
  }
  return ap;
}

APResult average_precision(std::span<const Detection> dets, std::span<const Quad> gts,
                           const EvalProtocol& protocol) {
  validate_protocol(protocol);
  const auto order = score_order(dets);

  // IoU matrix in score order.
  std::vector<double> iou(order.size() * gts.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      iou[r * gts.size() + g] = rotated_iou(dets[order[r]].quad, gts[g]);
    }
  }

  APResult result;
  result.thresholds = protocol.iou_thresholds;
  for (double thr : protocol.iou_thresholds) {
    std::vector<bool> matched(gts.size(), false);
    std::vector<std::uint8_t> is_tp(order.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) {
      int best = -1;
      double best_iou = thr;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        const double v = iou[r * gts.size() + g];
        if (!matched[g] && v >= thr && (best < 0 || v > best_iou)) {
          best = static_cast<int>(g);
          best_iou = v;
        }
      }
      if (best >= 0) {
        matched[static_cast<std::size_t>(best)] = true;
        is_tp[r] = 1;
      }
    }
    result.ap.push_back(ap_from_matches(is_tp, gts.size()));
  }
  result.mean = std::accumulate(result.ap.begin(), result.ap.end(), 0.0) /
                static_cast<double>(result.ap.size());
  return result;
}

}  // namespace obbreg
