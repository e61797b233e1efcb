#pragma once

// Slow, independent reference implementations used by the test and
// acceptance suites. Nothing here calls into geometry.cpp, postprocess.cpp
// or codec.cpp; only the plain data types are shared.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "obbreg/errors.hpp"
#include "obbreg/postprocess.hpp"
#include "obbreg/types.hpp"

namespace obbreg::oracles {

struct RngSeed {
  std::uint64_t seed{0};
};

struct McEstimate {
  double iou{0.0};
  double stderr_{0.0};  // binomial standard error of iou
  std::size_t union_hits{0};
  std::size_t inter_hits{0};
};

// Uniform sampling over the joint bounding box. samples >= 10^4.
McEstimate mc_iou(const Quad& a, const Quad& b, std::size_t samples, RngSeed seed);

// Angular sort about the centroid, rotated to start at the leftmost vertex
// (x-ties: smaller y), clockwise in image coordinates.
Quad hull_order(const std::array<Point2, 4>& points);

// Closed containment test by edge cross-product sign agreement.
bool contains(const Quad& q, const Point2& p);

// Exact IoU from the hull of mutually contained vertices and edge crossings.
double exact_iou(const Quad& a, const Quad& b);

// O(n^2) greedy suppression against the running kept list.
std::vector<std::size_t> brute_nms(std::span<const Detection> dets, double iou_threshold);

APResult reference_ap(std::span<const Detection> dets, std::span<const Quad> gts,
                      const EvalProtocol& protocol);

}  // namespace obbreg::oracles
