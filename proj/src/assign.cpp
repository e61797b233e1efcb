#include "obbreg/assign.hpp"

#include <cmath>

#include "obbreg/geometry.hpp"

namespace obbreg {

std::vector<Point2> grid_points(const FeatureGrid& g) {
  if (!(g.stride > 0.0) || g.width < 1 || g.height < 1) {
    throw InvalidInput("grid_points: stride must be positive and the grid non-empty");
  }
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height));
  for (int j = 0; j < g.height; ++j) {
    for (int i = 0; i < g.width; ++i) {
      pts.push_back({g.origin.x + g.stride * i, g.origin.y + g.stride * j});
    }
  }
  return pts;
}

std::vector<AssignmentLabel> assign(std::span<const Point2> points, std::span<const Quad> gts,
                                    const AssignConfig& cfg) {
  if (!(cfg.alpha > 0.0)) throw InvalidInput("assign: alpha must be positive");

  struct GtInfo {
    QuadExtent extent;
    double area;
  };
  std::vector<GtInfo> info;
  info.reserve(gts.size());
  for (const auto& q : gts) info.push_back({quad_center_extent(q), quad_area(q)});

  std::vector<AssignmentLabel> labels(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    const Point2& p = points[n];
    bool inside_any = false;
    int best = -1;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (!point_in_quad(p, gts[g])) continue;
      inside_any = true;
      const auto& e = info[g].extent;
      const bool near_center = std::abs(p.x - e.xc) < cfg.alpha * e.w && std::abs(p.y - e.yc) < cfg.alpha * e.h;
      if (near_center && (best < 0 || info[g].area < info[static_cast<std::size_t>(best)].area)) {
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      labels[n] = {LabelKind::Positive, best};
    } else if (inside_any) {
      labels[n] = {LabelKind::Ignore, -1};
    }
  }
  return labels;
}

}  // namespace obbreg
