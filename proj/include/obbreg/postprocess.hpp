#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "obbreg/errors.hpp"
#include "obbreg/types.hpp"

namespace obbreg {

struct Detection {
  Quad quad;
  double score{0.0};
  int class_id{0};
};

struct EvalProtocol {
  std::vector<double> iou_thresholds;

  static EvalProtocol ap50();
  static EvalProtocol ap75();
  // 0.50, 0.55, ..., 0.95
  static EvalProtocol ap50_95();
};

struct APResult {
  std::vector<double> thresholds;
  std::vector<double> ap;  // one per threshold
  double mean{0.0};
};

// Indices sorted by descending score, ties by lower index.
std::vector<std::size_t> score_order(std::span<const Detection> dets);

/// Greedy rotated NMS within each class. Returns kept indices in score
/// order; a detection is dropped when its IoU with an already kept
/// detection of the same class is >= iou_threshold.
std::vector<std::size_t> rnms(std::span<const Detection> dets, double iou_threshold);

/// Single-class average precision. Detections are matched in score order to
/// the still-unmatched ground truth of highest IoU (>= threshold); the
/// precision envelope is integrated over every recall step.
APResult average_precision(std::span<const Detection> dets, std::span<const Quad> gts,
                           const EvalProtocol& protocol);

// Precision envelope integral over a TP/FP sequence in score order.
double ap_from_matches(std::span<const std::uint8_t> is_tp, std::size_t num_gts);

void validate_protocol(const EvalProtocol& protocol);

}  // namespace obbreg
