#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "obbreg/errors.hpp"
#include "obbreg/types.hpp"

namespace obbreg {

enum class Branch { Direct, Swapped, ShiftMinus1, Shift0, ShiftPlus1 };

std::string_view branch_name(Branch b);

struct LossValue {
  double value{0.0};
  Branch active_branch{Branch::Direct};
};

struct LossConfig {
  // Transition point between the quadratic and linear pieces of smooth-l1.
  double smooth_l1_beta{1.0 / 9.0};
};

// ---------------------------------------------------------------------------
// Five-parameter losses
// ---------------------------------------------------------------------------

// Plain l1 over (cx, cy, w, h, theta) with the angle term in degrees.
LossValue l1_5p(const RBox5& p, const RBox5& t);

// min of the direct l1 and the swapped-representation correction
//   |dcx| + |dcy| + |w1 - h2| + |h1 - w2| + |90 - |theta1 - theta2||
// with angles in degrees.
LossValue modulated_5p_abs(const RBox5& p, const RBox5& t);

// Direct l1 in t-space.
LossValue l1_encoded_5p(const EncodedRBox5& p, const EncodedRBox5& t);

// t-space modulated loss. The swapped branch compensates the anchor aspect
// ratio r = ha / wa:
//   |dtx| + |dty| + |tw1 - th2 - log r| + |th1 - tw2 + log r| + ||dttheta| - pi/2|
// Ties resolve to Branch::Direct.
LossValue modulated_5p(const EncodedRBox5& p, const EncodedRBox5& t, const AnchorBox& a);

// As above, where each encoding carries the anchor it was built against.
// Throws AnchorMismatch when the anchors differ.
LossValue modulated_5p(const EncodedRBox5& p, const AnchorBox& p_anchor, const EncodedRBox5& t,
                       const AnchorBox& t_anchor);

std::array<double, 5> residuals_5p(const EncodedRBox5& p, const EncodedRBox5& t);

// ---------------------------------------------------------------------------
// Eight-parameter losses
// ---------------------------------------------------------------------------

// Corner-wise l1 normalised by (wa, ha) with prediction index offset k:
// sum_i |p[(i+k)%4].x - t[i].x| / wa + |p[(i+k)%4].y - t[i].y| / ha.
double corner_cost(const Quad& p, const Quad& t, const AnchorBox& a, int k);

// Shift0 cost only.
LossValue l1_8p(const Quad& p, const Quad& t, const AnchorBox& a);

// min over k in {-1, 0, +1} of corner_cost. Ties prefer Shift0, then
// ShiftMinus1.
LossValue modulated_8p(const Quad& p, const Quad& t, const AnchorBox& a);

// Normalised Shift0 residuals (x0, y0, x1, y1, ...).
std::array<double, 8> residuals_8p(const Quad& p, const Quad& t, const AnchorBox& a);

// ---------------------------------------------------------------------------
// Smooth l1 and gradients
// ---------------------------------------------------------------------------

// sum_i 0.5 r^2 / beta for |r| < beta, |r| - 0.5 beta otherwise.
double smooth_l1(std::span<const double> residuals, const LossConfig& cfg = {});

using ScalarFn = std::function<double(std::span<const double>)>;

// Central differences (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
std::vector<double> finite_diff_grad(const ScalarFn& loss_fn, std::span<const double> point,
                                     double eps);

// Piecewise-analytic gradient with respect to the prediction, plus how far
// the point is from a branch switch and from the nearest |.| kink of the
// active branch. The gradient is only meaningful when both are positive.
template <std::size_t N>
struct PiecewiseGradient {
  LossValue loss;
  std::array<double, N> grad{};
  double branch_margin{0.0};
  double min_residual{0.0};
};

// Gradient with respect to (tx, ty, tw, th, ttheta) of the prediction.
PiecewiseGradient<5> modulated_5p_gradient(const EncodedRBox5& p, const EncodedRBox5& t,
                                           const AnchorBox& a);

// Gradient with respect to the prediction corners (x0, y0, ..., x3, y3).
PiecewiseGradient<8> modulated_8p_gradient(const Quad& p, const Quad& t, const AnchorBox& a);

// ---------------------------------------------------------------------------
// Continuity scans
// ---------------------------------------------------------------------------

enum class LossMode { L1, SmoothL1, Modulated };

// Inclusive sample ladder lo, lo + step, ... <= hi.
struct SweepRange {
  double lo{0.0};
  double hi{0.0};
  double step{1.0};
};

std::vector<double> sweep_values(const SweepRange& r);

struct ScanSample {
  double angle{0.0};  // rotation offset from the ground truth, radians
  double loss{0.0};
  Branch branch{Branch::Direct};
  double jump{0.0};  // |loss - previous loss|, 0 for the first sample
};

struct ContinuityCurve {
  std::vector<ScanSample> samples;
  double max_jump{0.0};
  double max_jump_angle{0.0};
};

// Rotates gt rigidly about its centre by each sweep offset, re-canonicalises
// the prediction and evaluates t-space losses against `a`.
ContinuityCurve continuity_scan(const RBox5& gt, const AnchorBox& a, const SweepRange& sweep,
                                LossMode mode, const LossConfig& cfg = {});

// Eight-parameter variant; the rotated prediction is re-ordered with
// order_corners before evaluation.
ContinuityCurve continuity_scan(const Quad& gt, const AnchorBox& a, const SweepRange& sweep,
                                LossMode mode, const LossConfig& cfg = {});

}  // namespace obbreg
