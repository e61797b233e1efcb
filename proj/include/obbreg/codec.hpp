#pragma once

#include "obbreg/errors.hpp"
#include "obbreg/types.hpp"

namespace obbreg {

// tx = (cx - xa) / wa, ty = (cy - ya) / ha, tw = log(w / wa), th = log(h / ha).
// ttheta is the absolute angle in radians; anchors are horizontal.
EncodedRBox5 encode_rbox5(const RBox5& b, const AnchorBox& a);

// Inverse of encode_rbox5, canonicalised. Throws Overflow when the decoded
// width or height is not finite.
RBox5 decode_rbox5(const EncodedRBox5& e, const AnchorBox& a);

// The anchor's axis-aligned rectangle in order_corners order.
Quad anchor_quad(const AnchorBox& a);

// Smallest axis-aligned anchor enclosing the quad.
AnchorBox envelope_anchor(const Quad& q);

EncodedQuad encode_quad(const Quad& q, const AnchorBox& a);
Quad decode_quad(const EncodedQuad& e, const AnchorBox& a);

void validate_anchor(const AnchorBox& a);

}  // namespace obbreg
