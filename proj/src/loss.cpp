#include "obbreg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "obbreg/codec.hpp"
#include "obbreg/geometry.hpp"

namespace obbreg {
namespace {

double sgn(double v) { return (v > 0.0) - (v < 0.0); }

LossValue pick_5p(double direct, double swapped) {
  if (swapped < direct) return {swapped, Branch::Swapped};
  return {direct, Branch::Direct};
}

Branch shift_branch(int k) {
  switch (k) {
    case -1:
      return Branch::ShiftMinus1;
    case 1:
      return Branch::ShiftPlus1;
    default:
      return Branch::Shift0;
  }
}

// Evaluation order doubles as the tie-break order.
constexpr std::array<int, 3> kShifts{0, -1, 1};

}  // namespace

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::Direct:
      return "direct";
    case Branch::Swapped:
      return "swapped";
    case Branch::ShiftMinus1:
      return "shift-1";
    case Branch::Shift0:
      return "shift0";
    case Branch::ShiftPlus1:
      return "shift+1";
  }
  return "unknown";
}

LossValue l1_5p(const RBox5& p, const RBox5& t) {
  const double value = std::abs(p.cx - t.cx) + std::abs(p.cy - t.cy) + std::abs(p.w - t.w) +
                       std::abs(p.h - t.h) + std::abs(rad_to_deg(p.theta) - rad_to_deg(t.theta));
  return {value, Branch::Direct};
}

LossValue modulated_5p_abs(const RBox5& p, const RBox5& t) {
  const double center = std::abs(p.cx - t.cx) + std::abs(p.cy - t.cy);
  const double dtheta = std::abs(rad_to_deg(p.theta) - rad_to_deg(t.theta));
  const double direct = center + std::abs(p.w - t.w) + std::abs(p.h - t.h) + dtheta;
  const double swapped = center + std::abs(p.w - t.h) + std::abs(p.h - t.w) + std::abs(90.0 - dtheta);
  return pick_5p(direct, swapped);
}

std::array<double, 5> residuals_5p(const EncodedRBox5& p, const EncodedRBox5& t) {
  return {p.tx - t.tx, p.ty - t.ty, p.tw - t.tw, p.th - t.th, p.ttheta - t.ttheta};
}

LossValue l1_encoded_5p(const EncodedRBox5& p, const EncodedRBox5& t) {
  double value = 0.0;
  for (double r : residuals_5p(p, t)) value += std::abs(r);
  return {value, Branch::Direct};
}

LossValue modulated_5p(const EncodedRBox5& p, const EncodedRBox5& t, const AnchorBox& a) {
  validate_anchor(a);
  const double log_r = std::log(a.ha / a.wa);
  const double center = std::abs(p.tx - t.tx) + std::abs(p.ty - t.ty);
  const double dtheta = std::abs(p.ttheta - t.ttheta);
  const double direct = center + std::abs(p.tw - t.tw) + std::abs(p.th - t.th) + dtheta;
  const double swapped = center + std::abs(p.tw - t.th - log_r) + std::abs(p.th - t.tw + log_r) +
                         std::abs(dtheta - kHalfPi);
  return pick_5p(direct, swapped);
}

LossValue modulated_5p(const EncodedRBox5& p, const AnchorBox& p_anchor, const EncodedRBox5& t,
                       const AnchorBox& t_anchor) {
  if (!(p_anchor == t_anchor)) {
    throw AnchorMismatch("modulated_5p: prediction and target were encoded against different anchors");
  }
  return modulated_5p(p, t, p_anchor);
}

double corner_cost(const Quad& p, const Quad& t, const AnchorBox& a, int k) {
  double cost = 0.0;
  for (int i = 0; i < 4; ++i) {
    const Point2& pc = p.corners[((i + k) % 4 + 4) % 4];
    cost += std::abs(pc.x - t.corners[i].x) / a.wa + std::abs(pc.y - t.corners[i].y) / a.ha;
  }
  return cost;
}

LossValue l1_8p(const Quad& p, const Quad& t, const AnchorBox& a) {
  validate_anchor(a);
  return {corner_cost(p, t, a, 0), Branch::Shift0};
}

LossValue modulated_8p(const Quad& p, const Quad& t, const AnchorBox& a) {
  validate_anchor(a);
  LossValue best{std::numeric_limits<double>::infinity(), Branch::Shift0};
  for (int k : kShifts) {
    const double c = corner_cost(p, t, a, k);
    if (c < best.value) best = {c, shift_branch(k)};
  }
  return best;
}

std::array<double, 8> residuals_8p(const Quad& p, const Quad& t, const AnchorBox& a) {
  validate_anchor(a);
  std::array<double, 8> r{};
  for (int i = 0; i < 4; ++i) {
    r[2 * i] = (p.corners[i].x - t.corners[i].x) / a.wa;
    r[2 * i + 1] = (p.corners[i].y - t.corners[i].y) / a.ha;
  }
  return r;
}

double smooth_l1(std::span<const double> residuals, const LossConfig& cfg) {
  const double beta = cfg.smooth_l1_beta;
  if (!(beta > 0.0)) throw InvalidInput("smooth_l1: beta must be positive");
  double sum = 0.0;
  for (double r : residuals) {
    const double ar = std::abs(r);
    sum += ar < beta ? 0.5 * r * r / beta : ar - 0.5 * beta;
  }
  return sum;
}

std::vector<double> finite_diff_grad(const ScalarFn& loss_fn, std::span<const double> point,
                                     double eps) {
  if (!(eps > 0.0)) throw InvalidInput("finite_diff_grad: eps must be positive");
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = loss_fn(x);
    x[i] = saved - eps;
    const double down = loss_fn(x);
    x[i] = saved;
    grad[i] = (up - down) / (2.0 * eps);
  }
  return grad;
}

PiecewiseGradient<5> modulated_5p_gradient(const EncodedRBox5& p, const EncodedRBox5& t,
                                           const AnchorBox& a) {
  validate_anchor(a);
  const double log_r = std::log(a.ha / a.wa);
  const double dx = p.tx - t.tx;
  const double dy = p.ty - t.ty;
  const double dth = p.ttheta - t.ttheta;
  const double direct = std::abs(dx) + std::abs(dy) + std::abs(p.tw - t.tw) +
                        std::abs(p.th - t.th) + std::abs(dth);
  const double sw_w = p.tw - t.th - log_r;
  const double sw_h = p.th - t.tw + log_r;
  const double sw_a = std::abs(dth) - kHalfPi;
  const double swapped = std::abs(dx) + std::abs(dy) + std::abs(sw_w) + std::abs(sw_h) + std::abs(sw_a);

  PiecewiseGradient<5> g;
  g.loss = pick_5p(direct, swapped);
  g.branch_margin = std::abs(direct - swapped);
  if (g.loss.active_branch == Branch::Direct) {
    const double dw = p.tw - t.tw;
    const double dh = p.th - t.th;
    g.grad = {sgn(dx), sgn(dy), sgn(dw), sgn(dh), sgn(dth)};
    g.min_residual = std::min({std::abs(dx), std::abs(dy), std::abs(dw), std::abs(dh), std::abs(dth)});
  } else {
    g.grad = {sgn(dx), sgn(dy), sgn(sw_w), sgn(sw_h), sgn(sw_a) * sgn(dth)};
    g.min_residual = std::min({std::abs(dx), std::abs(dy), std::abs(sw_w), std::abs(sw_h),
                               std::abs(sw_a), std::abs(dth)});
  }
  return g;
}

PiecewiseGradient<8> modulated_8p_gradient(const Quad& p, const Quad& t, const AnchorBox& a) {
  validate_anchor(a);
  std::array<double, 3> costs{};
  for (int j = 0; j < 3; ++j) costs[j] = corner_cost(p, t, a, kShifts[j]);
  int best = 0;
  for (int j = 1; j < 3; ++j) {
    if (costs[j] < costs[best]) best = j;
  }
  const int k = kShifts[best];

  PiecewiseGradient<8> g;
  g.loss = {costs[best], shift_branch(k)};
  g.branch_margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 3; ++j) {
    if (j != best) g.branch_margin = std::min(g.branch_margin, costs[j] - costs[best]);
  }
  g.min_residual = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const int src = ((i + k) % 4 + 4) % 4;
    const double rx = p.corners[src].x - t.corners[i].x;
    const double ry = p.corners[src].y - t.corners[i].y;
    g.grad[2 * src] = sgn(rx) / a.wa;
    g.grad[2 * src + 1] = sgn(ry) / a.ha;
    g.min_residual = std::min({g.min_residual, std::abs(rx) / a.wa, std::abs(ry) / a.ha});
  }
  return g;
}

std::vector<double> sweep_values(const SweepRange& r) {
  if (!(r.step > 0.0) || !std::isfinite(r.step)) throw InvalidInput("sweep: step must be positive");
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.hi < r.lo) {
    throw InvalidInput("sweep: range must be finite with lo <= hi");
  }
  const double span = (r.hi - r.lo) / r.step;
  const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = r.lo + static_cast<double>(i) * r.step;
  return out;
}

namespace {

void finish_curve(ContinuityCurve& curve) {
  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    auto& s = curve.samples[i];
    s.jump = std::abs(s.loss - curve.samples[i - 1].loss);
    if (s.jump > curve.max_jump) {
      curve.max_jump = s.jump;
      curve.max_jump_angle = s.angle;
    }
  }
}

}  // namespace

ContinuityCurve continuity_scan(const RBox5& gt, const AnchorBox& a, const SweepRange& sweep,
                                LossMode mode, const LossConfig& cfg) {
  const RBox5 target_box = canonicalize_rbox5(gt.cx, gt.cy, gt.w, gt.h, gt.theta);
  const EncodedRBox5 target = encode_rbox5(target_box, a);
  ContinuityCurve curve;
  for (double delta : sweep_values(sweep)) {
    const RBox5 pred_box =
        canonicalize_rbox5(target_box.cx, target_box.cy, target_box.w, target_box.h, target_box.theta + delta);
    const EncodedRBox5 pred = encode_rbox5(pred_box, a);
    LossValue lv;
    switch (mode) {
      case LossMode::L1:
        lv = l1_encoded_5p(pred, target);
        break;
      case LossMode::SmoothL1: {
        const auto r = residuals_5p(pred, target);
        lv = {smooth_l1(r, cfg), Branch::Direct};
        break;
      }
      case LossMode::Modulated:
        lv = modulated_5p(pred, target, a);
        break;
    }
    curve.samples.push_back({delta, lv.value, lv.active_branch, 0.0});
  }
  finish_curve(curve);
  return curve;
}

ContinuityCurve continuity_scan(const Quad& gt, const AnchorBox& a, const SweepRange& sweep,
                                LossMode mode, const LossConfig& cfg) {
  const Quad target = order_corners(gt.corners);
  const QuadExtent ext = quad_center_extent(target);
  const Point2 center{ext.xc, ext.yc};
  ContinuityCurve curve;
  for (double delta : sweep_values(sweep)) {
    const Quad pred = order_corners(rotate_quad(target, center, delta).corners);
    LossValue lv;
    switch (mode) {
      case LossMode::L1:
        lv = l1_8p(pred, target, a);
        break;
      case LossMode::SmoothL1: {
        const auto r = residuals_8p(pred, target, a);
        lv = {smooth_l1(r, cfg), Branch::Shift0};
        break;
      }
      case LossMode::Modulated:
        lv = modulated_8p(pred, target, a);
        break;
    }
    curve.samples.push_back({delta, lv.value, lv.active_branch, 0.0});
  }
  finish_curve(curve);
  return curve;
}

}  // namespace obbreg
