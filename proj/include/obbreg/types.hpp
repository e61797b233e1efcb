#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace obbreg {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Image coordinates: x grows to the right, y grows downward.
struct Point2 {
  double x{0.0};
  double y{0.0};

  constexpr Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
  constexpr Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
  constexpr Point2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Point2&) const = default;
};

constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

// Five-parameter rectangle. The width edge points along (cos theta, sin theta)
// and the height edge along (-sin theta, cos theta). A canonical box has
// w > 0, h > 0 and theta in [-pi/2, 0).
struct RBox5 {
  double cx{0.0};
  double cy{0.0};
  double w{1.0};
  double h{1.0};
  double theta{-kHalfPi};

  constexpr bool operator==(const RBox5&) const = default;
};

// Four corners. Quads produced by order_corners start at the leftmost vertex
// (ties: smaller y) and run clockwise as seen in an image, which is a
// positive shoelace sum under the y-down convention. Losses also accept
// arbitrary cyclic shifts of an ordered quad.
struct Quad {
  std::array<Point2, 4> corners{};

  constexpr bool operator==(const Quad&) const = default;
};

struct ConvexPolygon {
  std::vector<Point2> vertices;
};

struct QuadExtent {
  double xc{0.0};
  double yc{0.0};
  double w{0.0};
  double h{0.0};
};

// Horizontal reference box used by both encodings.
struct AnchorBox {
  double xa{0.0};
  double ya{0.0};
  double wa{1.0};
  double ha{1.0};

  constexpr bool operator==(const AnchorBox&) const = default;
};

struct EncodedRBox5 {
  double tx{0.0};
  double ty{0.0};
  double tw{0.0};
  double th{0.0};
  double ttheta{0.0};

  constexpr bool operator==(const EncodedRBox5&) const = default;
};

// Per-corner offsets against the anchor's ordered corner rectangle,
// normalised by (wa, ha).
struct EncodedQuad {
  std::array<Point2, 4> offsets{};

  constexpr bool operator==(const EncodedQuad&) const = default;
};

}  // namespace obbreg
