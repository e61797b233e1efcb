#pragma once

#include <array>
#include <span>

#include "obbreg/errors.hpp"
#include "obbreg/types.hpp"

namespace obbreg {

// Relative tolerance for collinearity, on-edge classification and
// rectangle checks.
inline constexpr double kGeomTol = 1e-9;

/// Reorders four corners of a strictly convex quadrilateral: start at the
/// leftmost vertex, pick its diagonal partner as the vertex that separates
/// the remaining two, then place the remaining two so that the winding is
/// clockwise in image coordinates.
///
/// Throws DegenerateQuad when two points coincide, three are collinear or
/// the points are not in convex position.
Quad order_corners(const std::array<Point2, 4>& points);

/// Rectangle corners, ordered with order_corners.
Quad rbox5_to_quad(const RBox5& b);

/// Inverse of rbox5_to_quad. The quad must be a rectangle within a relative
/// tolerance of 1e-6; otherwise NotARectangle is thrown.
RBox5 quad_to_rbox5(const Quad& q);

/// Maps any (w, h, theta) triple to the unique equivalent box with theta in
/// [-pi/2, 0), swapping w and h when a quarter-turn shift is needed.
RBox5 canonicalize_rbox5(double cx, double cy, double w, double h, double theta);

// Shoelace sum over the vertex loop; positive for image-clockwise winding.
double signed_area(std::span<const Point2> vertices);
double polygon_area(const ConvexPolygon& p);
double quad_area(const Quad& q);

/// Intersection of two convex polygons by successive half-plane clipping of
/// `subject` against every edge of `clip`. Either winding is accepted; the
/// result is returned with positive winding and is empty when the inputs do
/// not overlap with positive area.
ConvexPolygon clip_convex(const ConvexPolygon& subject, const ConvexPolygon& clip);

/// Exact intersection-over-union of two convex quads. Symmetric bit-for-bit.
double rotated_iou(const Quad& a, const Quad& b);

// Inside or on the boundary.
bool point_in_quad(const Point2& p, const Quad& q);
bool point_in_polygon(const Point2& p, const ConvexPolygon& poly, double tol = kGeomTol);

/// Corner mean and adjacent edge lengths: w = |c1 - c0|, h = |c2 - c1|.
QuadExtent quad_center_extent(const Quad& q);

// Rigid motions and index shifts used by the sweeps and property suites.
Quad rotate_quad(const Quad& q, const Point2& center, double angle);
Quad translate_quad(const Quad& q, const Point2& offset);
// result[i] = q[(i + k) mod 4]
Quad shift_corners(const Quad& q, int k);
ConvexPolygon to_polygon(const Quad& q);

}  // namespace obbreg
