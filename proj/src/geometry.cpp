#include "obbreg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace obbreg {
namespace {

bool finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

double coordinate_span(std::span<const Point2> pts) {
  double lo_x = pts[0].x, hi_x = pts[0].x, lo_y = pts[0].y, hi_y = pts[0].y;
  for (const auto& p : pts) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  return std::max(hi_x - lo_x, hi_y - lo_y);
}

bool nearly_collinear(const Point2& a, const Point2& b, const Point2& c) {
  const Point2 ab = b - a;
  const Point2 ac = c - a;
  return std::abs(cross(ab, ac)) <= kGeomTol * norm(ab) * norm(ac);
}

// Signed distance of p from the directed line a->b; positive on the left
// (math convention), i.e. inside a positively wound polygon.
double side_of(const Point2& a, const Point2& b, const Point2& p) {
  const Point2 e = b - a;
  const double len = norm(e);
  if (len == 0.0) return 0.0;
  return cross(e, p - a) / len;
}

std::vector<Point2> positively_wound(std::vector<Point2> v) {
  if (signed_area(v) < 0.0) std::reverse(v.begin(), v.end());
  return v;
}

bool lexicographically_less(const Quad& a, const Quad& b) {
  for (int i = 0; i < 4; ++i) {
    const auto& p = a.corners[i];
    const auto& q = b.corners[i];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
  }
  return false;
}

}  // namespace

Quad order_corners(const std::array<Point2, 4>& points) {
  for (const auto& p : points) {
    if (!finite(p)) throw DegenerateQuad("order_corners: non-finite coordinate");
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        if (nearly_collinear(points[i], points[j], points[k])) {
          throw DegenerateQuad("order_corners: points " + std::to_string(i) + ", " +
                               std::to_string(j) + ", " + std::to_string(k) +
                               " are collinear or coincident");
        }
      }
    }
  }

  // Leftmost vertex; x-ties within tolerance go to the smaller y.
  const double tie = kGeomTol * std::max(1.0, coordinate_span(points));
  int first = 0;
  for (int i = 1; i < 4; ++i) {
    const auto& p = points[i];
    const auto& best = points[first];
    if (p.x < best.x - tie || (std::abs(p.x - best.x) <= tie && p.y < best.y)) first = i;
  }

  std::array<Point2, 3> rest{};
  for (int i = 0, n = 0; i < 4; ++i) {
    if (i != first) rest[n++] = points[i];
  }
  const Point2 p1 = points[first];

  // The diagonal partner of p1 has the other two vertices on opposite sides.
  int opposite = -1;
  for (int i = 0; i < 3; ++i) {
    const Point2 d = rest[i] - p1;
    const double s2 = cross(d, rest[(i + 1) % 3] - p1);
    const double s3 = cross(d, rest[(i + 2) % 3] - p1);
    if (s2 * s3 < 0.0) {
      opposite = i;
      break;
    }
  }
  if (opposite < 0) throw DegenerateQuad("order_corners: points are not in convex position");

  const Point2 p3 = rest[opposite];
  const Point2 sa = rest[(opposite + 1) % 3];
  const Point2 sb = rest[(opposite + 2) % 3];
  // Image-clockwise: the vertex after p1 lies on the negative side of p1->p3.
  const bool sa_first = cross(p3 - p1, sa - p1) < 0.0;
  Quad q{{p1, sa_first ? sa : sb, p3, sa_first ? sb : sa}};

  for (int i = 0; i < 4; ++i) {
    const Point2 e0 = q.corners[(i + 1) % 4] - q.corners[i];
    const Point2 e1 = q.corners[(i + 2) % 4] - q.corners[(i + 1) % 4];
    if (!(cross(e0, e1) > 0.0)) {
      throw DegenerateQuad("order_corners: quadrilateral is not strictly convex");
    }
  }
  return q;
}

Quad rbox5_to_quad(const RBox5& b) {
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw InvalidInput("rbox5_to_quad: w and h must be positive");
  const Point2 c{b.cx, b.cy};
  const Point2 u{std::cos(b.theta), std::sin(b.theta)};
  const Point2 v{-u.y, u.x};
  const Point2 hu = u * (0.5 * b.w);
  const Point2 hv = v * (0.5 * b.h);
  return order_corners({c - hu - hv, c + hu - hv, c + hu + hv, c - hu + hv});
}

RBox5 quad_to_rbox5(const Quad& q) {
  constexpr double rel = 1e-6;
  const auto& c = q.corners;
  const Point2 e0 = c[1] - c[0];
  const Point2 e1 = c[2] - c[1];
  const Point2 e2 = c[3] - c[2];
  const Point2 e3 = c[0] - c[3];
  const double l0 = norm(e0), l1 = norm(e1), l2 = norm(e2), l3 = norm(e3);
  const double scale = std::max({l0, l1, l2, l3});
  if (!(scale > 0.0) || !std::isfinite(scale)) throw NotARectangle("quad_to_rbox5: degenerate quad");
  if (std::min(l0, l1) <= rel * scale) throw NotARectangle("quad_to_rbox5: zero-length edge");
  if (std::abs(l0 - l2) > rel * scale || std::abs(l1 - l3) > rel * scale) {
    throw NotARectangle("quad_to_rbox5: opposite edges differ in length");
  }
  if (std::abs(dot(e0, e1)) > rel * l0 * l1 || std::abs(dot(e1, e2)) > rel * l1 * l2) {
    throw NotARectangle("quad_to_rbox5: adjacent edges are not perpendicular");
  }
  const Point2 center = (c[0] + c[1] + c[2] + c[3]) * 0.25;
  return canonicalize_rbox5(center.x, center.y, l0, l1, std::atan2(e0.y, e0.x));
}

RBox5 canonicalize_rbox5(double cx, double cy, double w, double h, double theta) {
  if (!(w > 0.0) || !(h > 0.0)) throw InvalidInput("canonicalize_rbox5: w and h must be positive");
  if (!std::isfinite(theta)) throw InvalidInput("canonicalize_rbox5: theta must be finite");
  if (theta >= -kHalfPi && theta < 0.0) return {cx, cy, w, h, theta};

  // Reduce modulo pi into [-pi/2, pi/2), then fold [0, pi/2) down by a
  // quarter turn with a width/height swap.
  double t = theta - kPi * std::floor((theta + kHalfPi) / kPi);
  if (t >= kHalfPi) t -= kPi;
  if (t < -kHalfPi) t += kPi;
  if (t >= 0.0) {
    std::swap(w, h);
    t -= kHalfPi;
  }
  if (t < -kHalfPi) t = -kHalfPi;
  return {cx, cy, w, h, t};
}

double signed_area(std::span<const Point2> vertices) {
  const std::size_t n = vertices.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    twice += cross(vertices[i], vertices[(i + 1) % n]);
  }
  return 0.5 * twice;
}

double polygon_area(const ConvexPolygon& p) { return std::abs(signed_area(p.vertices)); }

double quad_area(const Quad& q) { return std::abs(signed_area(q.corners)); }

ConvexPolygon clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip) {
  if (subject.vertices.size() < 3 || clip.vertices.size() < 3) return {};
  std::vector<Point2> out = positively_wound(subject.vertices);
  const std::vector<Point2> window = positively_wound(clip.vertices);

  const std::size_t m = window.size();
  for (std::size_t e = 0; e < m && !out.empty(); ++e) {
    const Point2 a = window[e];
    const Point2 b = window[(e + 1) % m];
    const double tol = kGeomTol * std::max(1.0, norm(b - a));

    std::vector<Point2> next;
    next.reserve(out.size() + 2);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& cur = out[i];
      const Point2& prev = out[(i + n - 1) % n];
      const double s_cur = side_of(a, b, cur);
      const double s_prev = side_of(a, b, prev);
      const bool in_cur = s_cur >= -tol;
      const bool in_prev = s_prev >= -tol;
      if (in_cur != in_prev) {
        const double t = s_prev / (s_prev - s_cur);
        next.push_back(prev + (cur - prev) * t);
      }
      if (in_cur) next.push_back(cur);
    }
    out = std::move(next);
  }

  // Drop repeated vertices introduced by on-edge points.
  std::vector<Point2> cleaned;
  const double eps = kGeomTol * std::max(1.0, coordinate_span(window));
  for (const auto& p : out) {
    if (cleaned.empty() || distance(cleaned.back(), p) > eps) cleaned.push_back(p);
  }
  while (cleaned.size() > 1 && distance(cleaned.front(), cleaned.back()) <= eps) cleaned.pop_back();
  if (cleaned.size() < 3 || !(signed_area(cleaned) > 0.0)) return {};
  return {std::move(cleaned)};
}

double rotated_iou(const Quad& a, const Quad& b) {
  // Fixed argument order keeps the result symmetric to the last bit.
  const Quad& first = lexicographically_less(b, a) ? b : a;
  const Quad& second = (&first == &a) ? b : a;
  const double area_a = quad_area(first);
  const double area_b = quad_area(second);
  if (!(area_a > 0.0) || !(area_b > 0.0)) return 0.0;
  const double inter = polygon_area(clip_convex(to_polygon(first), to_polygon(second)));
  const double uni = area_a + area_b - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool point_in_polygon(const Point2& p, const ConvexPolygon& poly, double tol) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  if (n < 3) return false;
  const double orient = signed_area(v) >= 0.0 ? 1.0 : -1.0;
  const double slack = tol * std::max(1.0, coordinate_span(v));
  for (std::size_t i = 0; i < n; ++i) {
    if (orient * side_of(v[i], v[(i + 1) % n], p) < -slack) return false;
  }
  return true;
}

bool point_in_quad(const Point2& p, const Quad& q) {
  const auto& v = q.corners;
  const double orient = signed_area(v) >= 0.0 ? 1.0 : -1.0;
  const double slack = kGeomTol * std::max(1.0, coordinate_span(v));
  for (int i = 0; i < 4; ++i) {
    if (orient * side_of(v[i], v[(i + 1) % 4], p) < -slack) return false;
  }
  return true;
}

QuadExtent quad_center_extent(const Quad& q) {
  const auto& c = q.corners;
  const Point2 mean = (c[0] + c[1] + c[2] + c[3]) * 0.25;
  return {mean.x, mean.y, distance(c[0], c[1]), distance(c[1], c[2])};
}

Quad rotate_quad(const Quad& q, const Point2& center, double angle) {
  const double cs = std::cos(angle);
  const double sn = std::sin(angle);
  Quad out;
  for (int i = 0; i < 4; ++i) {
    const Point2 d = q.corners[i] - center;
    out.corners[i] = center + Point2{cs * d.x - sn * d.y, sn * d.x + cs * d.y};
  }
  return out;
}

Quad translate_quad(const Quad& q, const Point2& offset) {
  Quad out = q;
  for (auto& c : out.corners) c = c + offset;
  return out;
}

Quad shift_corners(const Quad& q, int k) {
  Quad out;
  for (int i = 0; i < 4; ++i) out.corners[i] = q.corners[((i + k) % 4 + 4) % 4];
  return out;
}

ConvexPolygon to_polygon(const Quad& q) { return {{q.corners.begin(), q.corners.end()}}; }

}  // namespace obbreg
