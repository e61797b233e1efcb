#include "obbreg/codec.hpp"

#include <algorithm>
#include <cmath>

#include "obbreg/geometry.hpp"

namespace obbreg {

void validate_anchor(const AnchorBox& a) {
  if (!(a.wa > 0.0) || !(a.ha > 0.0) || !std::isfinite(a.wa) || !std::isfinite(a.ha) ||
      !std::isfinite(a.xa) || !std::isfinite(a.ya)) {
    throw InvalidInput("anchor must be finite with wa > 0 and ha > 0");
  }
}

EncodedRBox5 encode_rbox5(const RBox5& b, const AnchorBox& a) {
  validate_anchor(a);
  if (!(b.w > 0.0) || !(b.h > 0.0)) throw InvalidInput("encode_rbox5: w and h must be positive");
  return {(b.cx - a.xa) / a.wa, (b.cy - a.ya) / a.ha, std::log(b.w / a.wa), std::log(b.h / a.ha),
          b.theta};
}

RBox5 decode_rbox5(const EncodedRBox5& e, const AnchorBox& a) {
  validate_anchor(a);
  const double w = std::exp(e.tw) * a.wa;
  const double h = std::exp(e.th) * a.ha;
  if (!std::isfinite(w) || !std::isfinite(h)) throw Overflow("decode_rbox5: decoded size overflows");
  if (!(w > 0.0) || !(h > 0.0)) throw Overflow("decode_rbox5: decoded size underflows to zero");
  if (!std::isfinite(e.tx) || !std::isfinite(e.ty) || !std::isfinite(e.ttheta)) {
    throw InvalidInput("decode_rbox5: non-finite encoding");
  }
  return canonicalize_rbox5(a.xa + e.tx * a.wa, a.ya + e.ty * a.ha, w, h, e.ttheta);
}

Quad anchor_quad(const AnchorBox& a) {
  validate_anchor(a);
  const double x0 = a.xa - 0.5 * a.wa;
  const double x1 = a.xa + 0.5 * a.wa;
  const double y0 = a.ya - 0.5 * a.ha;
  const double y1 = a.ya + 0.5 * a.ha;
  // Leftmost-then-topmost, clockwise in image coordinates.
  return {{Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}}};
}

AnchorBox envelope_anchor(const Quad& q) {
  double lo_x = q.corners[0].x, hi_x = lo_x, lo_y = q.corners[0].y, hi_y = lo_y;
  for (const auto& c : q.corners) {
    lo_x = std::min(lo_x, c.x);
    hi_x = std::max(hi_x, c.x);
    lo_y = std::min(lo_y, c.y);
    hi_y = std::max(hi_y, c.y);
  }
  return {0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y), hi_x - lo_x, hi_y - lo_y};
}

EncodedQuad encode_quad(const Quad& q, const AnchorBox& a) {
  const Quad ref = anchor_quad(a);
  EncodedQuad e;
  for (int i = 0; i < 4; ++i) {
    e.offsets[i] = {(q.corners[i].x - ref.corners[i].x) / a.wa,
                    (q.corners[i].y - ref.corners[i].y) / a.ha};
  }
  return e;
}

Quad decode_quad(const EncodedQuad& e, const AnchorBox& a) {
  const Quad ref = anchor_quad(a);
  Quad q;
  for (int i = 0; i < 4; ++i) {
    q.corners[i] = {ref.corners[i].x + e.offsets[i].x * a.wa,
                    ref.corners[i].y + e.offsets[i].y * a.ha};
  }
  return q;
}

}  // namespace obbreg
