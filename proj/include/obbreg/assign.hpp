#pragma once

#include <span>
#include <vector>

#include "obbreg/errors.hpp"
#include "obbreg/types.hpp"

namespace obbreg {

struct FeatureGrid {
  double stride{8.0};
  int width{1};
  int height{1};
  Point2 origin{};  // centre of cell (0, 0)
};

struct AssignConfig {
  double alpha{0.8};
};

enum class LabelKind { Negative, Ignore, Positive };

struct AssignmentLabel {
  LabelKind kind{LabelKind::Negative};
  int gt_index{-1};  // set for Positive only

  bool operator==(const AssignmentLabel&) const = default;
};

// Row-major cell centres: origin + stride * (i, j), i along x.
std::vector<Point2> grid_points(const FeatureGrid& g);

/// Point-based sample assignment. A point outside every ground truth is
/// Negative. A point inside a ground truth q, with extent (xc, yc, w, h)
/// from quad_center_extent, passes q when |x - xc| < alpha * w and
/// |y - yc| < alpha * h. Among passing ground truths the smallest-area one
/// (then lowest index) wins; inside-but-never-passing points are Ignore.
std::vector<AssignmentLabel> assign(std::span<const Point2> points, std::span<const Quad> gts,
                                    const AssignConfig& cfg = {});

}  // namespace obbreg
