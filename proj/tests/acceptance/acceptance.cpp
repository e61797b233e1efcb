// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "obbreg/assign.hpp"
#include "obbreg/cli.hpp"
#include "obbreg/codec.hpp"
#include "obbreg/geometry.hpp"
#include "obbreg/loss.hpp"
#include "obbreg/oracles.hpp"
#include "obbreg/postprocess.hpp"
#include "scene.hpp"
#include "support.hpp"

using namespace obbreg;
using obbreg::testing::Gen;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

Outcome boundary_values() {
  const RBox5 p{0, 0, 10, 25, deg_to_rad(-89.0)};
  const RBox5 t{0, 0, 25, 10, deg_to_rad(-1.0)};
  const AnchorBox a{0, 0, 10, 25};
  const double l1 = l1_5p(p, t).value;
  const double mr = modulated_5p_abs(p, t).value;
  const double enc = modulated_5p(encode_rbox5(p, a), encode_rbox5(t, a), a).value;
  const bool ok = l1 == 118.0 && mr == 2.0 && std::abs(enc - 2.0 * kPi / 180.0) <= 1e-9;
  return {ok, fmt("l1=%.17g modulated=%.17g encoded=%.17g (target %.17g)", l1, mr, enc, 2.0 * kPi / 180.0)};
}

Outcome continuity() {
  Gen gen(2);
  double worst_mod = 0.0, worst_ratio = 1e300, min_l1_jump = 1e300;
  for (int n = 0; n < 50; ++n) {
    const double s = gen.uniform(4.0, 40.0);
    const double ratio = gen.uniform(2.0, 6.0);
    RBox5 gt{gen.uniform(-50, 50), gen.uniform(-50, 50), s, s * ratio, gen.uniform(-kHalfPi, 0.0)};
    if (gen.integer(0, 1)) std::swap(gt.w, gt.h);
    const AnchorBox a = envelope_anchor(rbox5_to_quad(gt));
    const SweepRange fine{deg_to_rad(-90.0), deg_to_rad(90.0), deg_to_rad(0.01)};
    const SweepRange coarse{deg_to_rad(-90.0), deg_to_rad(90.0), deg_to_rad(0.1)};
    const auto mod = continuity_scan(gt, a, fine, LossMode::Modulated);
    const auto mod_coarse = continuity_scan(gt, a, coarse, LossMode::Modulated);
    const auto l1 = continuity_scan(gt, a, fine, LossMode::L1);
    worst_mod = std::max(worst_mod, mod.max_jump);
    worst_ratio = std::min(worst_ratio, mod_coarse.max_jump / mod.max_jump);
    // Largest l1 jump within 0.02 deg of the representation boundary.
    double boundary_jump = 0.0;
    for (const auto& smp : l1.samples) {
      const double ang = rad_to_deg(gt.theta + smp.angle);
      if (std::abs(ang + 90.0) < 0.02 || std::abs(ang) < 0.02) boundary_jump = std::max(boundary_jump, smp.jump);
    }
    min_l1_jump = std::min(min_l1_jump, boundary_jump);
  }
  const bool ok = worst_mod < 0.05 && min_l1_jump > 0.5 && worst_ratio >= 5.0;
  return {ok, fmt("max modulated jump=%.4g, min l1 boundary jump=%.4g, min jump shrink (0.1->0.01 deg)=%.3gx",
                  worst_mod, min_l1_jump, worst_ratio)};
}

Outcome shift_absorption() {
  Gen gen(3);
  int bad = 0;
  for (int n = 0; n < 1000; ++n) {
    const Quad q = order_corners(gen.convex_points());
    const AnchorBox a = gen.anchor();
    for (int k : {-1, 0, 1}) bad += modulated_8p(shift_corners(q, k), q, a).value != 0.0;
  }
  return {bad == 0, fmt("%d nonzero of 3000", bad)};
}

Outcome modulated_bounded_by_l1() {
  Gen gen(4);
  int bad = 0;
  for (int n = 0; n < 10000; ++n) {
    const RBox5 p = gen.rbox(), t = gen.rbox();
    const AnchorBox a = gen.anchor();
    const EncodedRBox5 ep = encode_rbox5(p, a), et = encode_rbox5(t, a);
    const Quad qp = order_corners(gen.convex_points()), qt = order_corners(gen.convex_points());
    bad += modulated_5p_abs(p, t).value > l1_5p(p, t).value;
    bad += modulated_5p(ep, et, a).value > l1_encoded_5p(ep, et).value;
    bad += modulated_8p(qp, qt, a).value > l1_8p(qp, qt, a).value;
  }
  return {bad == 0, fmt("%d violations over 3 x 10000 pairs", bad)};
}

Outcome rotated_iou_checks() {
  Gen gen(5);
  double worst_mc = 0.0, worst_closed = 0.0;
  int asym = 0, self_bad = 0;
  for (int n = 0; n < 200; ++n) {
    const RBox5 ba = gen.rbox(15.0, 4.0, 40.0);
    const RBox5 bb = gen.rbox(15.0, 4.0, 40.0);
    const Quad a = rbox5_to_quad(ba), b = rbox5_to_quad(bb);
    const auto mc = oracles::mc_iou(a, b, 1'000'000, {static_cast<std::uint64_t>(n + 1)});
    const double iou = rotated_iou(a, b);
    worst_mc = std::max(worst_mc, std::abs(iou - mc.iou));
    asym += iou != rotated_iou(b, a);
    self_bad += rotated_iou(a, a) != 1.0;
  }
  for (int n = 0; n < 100; ++n) {
    const double w1 = gen.uniform(1, 50), w2 = gen.uniform(1, 50), h = gen.uniform(1, 50);
    const double cx = gen.uniform(-20, 20), cy = gen.uniform(-20, 20);
    const double iou =
        rotated_iou(rbox5_to_quad({cx, cy, h, w1, -kHalfPi}), rbox5_to_quad({cx, cy, h, w2, -kHalfPi}));
    worst_closed = std::max(worst_closed, std::abs(iou - std::min(w1, w2) / std::max(w1, w2)));
  }
  for (int n = 0; n < 10000; ++n) {
    const Quad a = rbox5_to_quad(gen.rbox(10.0)), b = rbox5_to_quad(gen.rbox(10.0));
    asym += rotated_iou(a, b) != rotated_iou(b, a);
    self_bad += rotated_iou(a, a) != 1.0;
  }
  const bool ok = worst_mc <= 5e-3 && worst_closed <= 1e-9 && asym == 0 && self_bad == 0;
  return {ok, fmt("max |iou-mc|=%.3g, max closed-form err=%.3g, asymmetric=%d, self-iou!=1: %d", worst_mc,
                  worst_closed, asym, self_bad)};
}

Outcome corner_ordering() {
  Gen gen(6);
  int mismatch = 0;
  for (int n = 0; n < 10000; ++n) {
    const auto pts = gen.convex_points();
    mismatch += !(order_corners(pts) == oracles::hull_order(pts));
  }
  int not_raised = 0;
  const std::vector<std::array<Point2, 4>> collinear{
      {Point2{0, 0}, Point2{1, 0}, Point2{2, 0}, Point2{1, 1}},
      {Point2{0, 0}, Point2{1, 1}, Point2{2, 2}, Point2{3, 3}},
      {Point2{5, 5}, Point2{5, 6}, Point2{5, 7}, Point2{0, 6}},
  };
  for (const auto& c : collinear) {
    try {
      order_corners(c);
      ++not_raised;
    } catch (const DegenerateQuad&) {
    }
  }
  return {mismatch == 0 && not_raised == 0,
          fmt("%d mismatches of 10000, %d collinear inputs accepted", mismatch, not_raised)};
}

Outcome boundary_fit() {
  const RBox5 ref{0, 0, 100, 25, -kHalfPi};
  const RBox5 gt{0, 0, 25, 100, deg_to_rad(-10.0)};
  cli::FitOptions o5;
  o5.params = cli::ParamKind::FiveParam;
  cli::FitOptions o8;
  o8.params = cli::ParamKind::EightParam;

  auto t0 = std::chrono::steady_clock::now();
  const auto r5 = cli::fit(ref, gt, o5);
  const double s5 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t0 = std::chrono::steady_clock::now();
  const auto r8 = cli::fit(ref, gt, o8);
  const double s8 = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const auto& b5 = r5.trajectory[r5.best_index];
  const auto& b8 = r8.trajectory[r8.best_index];
  const bool ok = b5.iou > 0.9 && b8.iou > 0.9 && b5.step <= 2000 && b8.step <= 2000 && s5 < 5.0 && s8 < 5.0;
  return {ok, fmt("5p: best iou %.4f at step %d, last %.4f at step %d (%.2fs); "
                  "8p: best iou %.4f at step %d, last %.4f at step %d (%.2fs)",
                  b5.iou, b5.step, r5.trajectory.back().iou, r5.trajectory.back().step, s5, b8.iou, b8.step,
                  r8.trajectory.back().iou, r8.trajectory.back().step, s8)};
}

Outcome gradient_checks() {
  Gen gen(8);
  double worst5 = 0.0, worst8 = 0.0;
  int n5 = 0, n8 = 0;
  while (n5 < 1000) {
    const AnchorBox a = gen.anchor();
    const EncodedRBox5 t = encode_rbox5(gen.rbox(), a);
    const EncodedRBox5 p{t.tx + gen.uniform(-1, 1), t.ty + gen.uniform(-1, 1), t.tw + gen.uniform(-1, 1),
                         t.th + gen.uniform(-1, 1), gen.uniform(-kHalfPi, 0.0)};
    const auto g = modulated_5p_gradient(p, t, a);
    if (g.branch_margin <= 1e-3 || g.min_residual <= 1e-3) continue;
    const ScalarFn f = [&](std::span<const double> x) {
      return modulated_5p({x[0], x[1], x[2], x[3], x[4]}, t, a).value;
    };
    const std::array<double, 5> x{p.tx, p.ty, p.tw, p.th, p.ttheta};
    const auto fd = finite_diff_grad(f, x, 1e-6);
    for (int i = 0; i < 5; ++i) worst5 = std::max(worst5, std::abs(fd[i] - g.grad[i]) / std::abs(g.grad[i]));
    ++n5;
  }
  while (n8 < 1000) {
    const AnchorBox a = gen.anchor();
    const Quad t = order_corners(gen.convex_points());
    Quad p = shift_corners(t, gen.integer(-1, 1));
    for (auto& c : p.corners) c = c + Point2{gen.uniform(-5, 5), gen.uniform(-5, 5)};
    const auto g = modulated_8p_gradient(p, t, a);
    if (g.branch_margin <= 1e-3 || g.min_residual <= 1e-3) continue;
    const ScalarFn f = [&](std::span<const double> x) {
      Quad q;
      for (int i = 0; i < 4; ++i) q.corners[i] = {x[2 * i], x[2 * i + 1]};
      return modulated_8p(q, t, a).value;
    };
    std::array<double, 8> x{};
    for (int i = 0; i < 4; ++i) {
      x[2 * i] = p.corners[i].x;
      x[2 * i + 1] = p.corners[i].y;
    }
    const auto fd = finite_diff_grad(f, x, 1e-6);
    for (int i = 0; i < 8; ++i) worst8 = std::max(worst8, std::abs(fd[i] - g.grad[i]) / std::abs(g.grad[i]));
    ++n8;
  }
  return {worst5 <= 1e-5 && worst8 <= 1e-5,
          fmt("max relative error 5p=%.3g, 8p=%.3g over %d + %d filtered points", worst5, worst8, n5, n8)};
}

Outcome roundtrips() {
  Gen gen(9);
  double e5 = 0.0, e8 = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const RBox5 b = gen.rbox();
    const AnchorBox a = gen.anchor();
    const RBox5 r = decode_rbox5(encode_rbox5(b, a), a);
    e5 = std::max({e5, std::abs(r.cx - b.cx), std::abs(r.cy - b.cy), std::abs(r.w - b.w), std::abs(r.h - b.h),
                   std::abs(r.theta - b.theta)});
    const Quad q = order_corners(gen.convex_points());
    const Quad rq = decode_quad(encode_quad(q, a), a);
    for (int i = 0; i < 4; ++i) {
      e8 = std::max({e8, std::abs(rq.corners[i].x - q.corners[i].x), std::abs(rq.corners[i].y - q.corners[i].y)});
    }
  }
  return {e5 < 1e-9 && e8 < 1e-9, fmt("max abs error 5p=%.3g, 8p=%.3g", e5, e8)};
}

Outcome postprocess_oracles() {
  Gen gen(10);
  int nms_bad = 0, ap_bad = 0, monotone_bad = 0;
  for (int n = 0; n < 100; ++n) {
    const auto scene = testing::random_scene(gen, 80, 3);
    const double thr = gen.uniform(0.1, 0.9);
    nms_bad += rnms(scene.dets, thr) != oracles::brute_nms(scene.dets, thr);

    const auto s1 = testing::random_scene(gen, 60, 1);
    const auto p = EvalProtocol::ap50_95();
    const APResult fast = average_precision(s1.dets, s1.gts, p);
    const APResult ref = oracles::reference_ap(s1.dets, s1.gts, p);
    ap_bad += fast.ap != ref.ap || fast.mean != ref.mean;
    for (std::size_t i = 1; i < fast.ap.size(); ++i) monotone_bad += fast.ap[i] > fast.ap[i - 1];
  }
  return {nms_bad == 0 && ap_bad == 0 && monotone_bad == 0,
          fmt("nms mismatches=%d/100, ap mismatches=%d/100, threshold monotonicity violations=%d", nms_bad, ap_bad,
              monotone_bad)};
}

Outcome assignment() {
  Gen gen(11);
  int alpha_bad = 0, tiny_bad = 0;
  for (int n = 0; n < 1000; ++n) {
    // Monotonicity in alpha: positives only grow, negatives never change.
    std::vector<Quad> gts;
    const int k = gen.integer(1, 4);
    for (int g = 0; g < k; ++g) gts.push_back(rbox5_to_quad(gen.rbox(30.0, 2.0, 30.0)));
    const auto pts = grid_points({gen.uniform(1.0, 6.0), 20, 20, {gen.uniform(-50, -40), gen.uniform(-50, -40)}});
    const double a1 = gen.uniform(0.1, 1.5), a2 = a1 + gen.uniform(0.0, 1.0);
    const auto l1 = assign(pts, gts, {a1});
    const auto l2 = assign(pts, gts, {a2});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (l1[i].kind == LabelKind::Positive && l2[i].kind != LabelKind::Positive) ++alpha_bad;
      if ((l1[i].kind == LabelKind::Negative) != (l2[i].kind == LabelKind::Negative)) ++alpha_bad;
    }

    // Tiny objects: stride below alpha * min(w, h), random grid phase.
    const double alpha = gen.uniform(0.5, 1.0);
    const RBox5 b{0, 0, gen.uniform(2.0, 12.0), gen.uniform(2.0, 12.0), gen.uniform(-kHalfPi, 0.0)};
    const std::vector<Quad> tiny{rbox5_to_quad(b)};
    const double stride = alpha * std::min(b.w, b.h) * gen.uniform(0.05, 0.999);
    const Point2 origin{-20.0 + gen.uniform(0.0, stride), -20.0 + gen.uniform(0.0, stride)};
    const int cells = static_cast<int>(std::ceil(40.0 / stride)) + 1;
    const auto labels = assign(grid_points({stride, cells, cells, origin}), tiny, {alpha});
    bool any = false;
    for (const auto& l : labels) any |= l.kind == LabelKind::Positive;
    tiny_bad += !any;
  }
  return {alpha_bad == 0 && tiny_bad == 0,
          fmt("alpha monotonicity violations=%d, tiny GTs without positives=%d/1000", alpha_bad, tiny_bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"boundary-case loss values", boundary_values},
      {"loss continuity across the angle boundary", continuity},
      {"8p shift absorption", shift_absorption},
      {"modulated loss bounded by l1", modulated_bounded_by_l1},
      {"rotated IoU vs oracles", rotated_iou_checks},
      {"corner ordering vs hull oracle", corner_ordering},
      {"boundary-case fit", boundary_fit},
      {"piecewise gradients vs finite differences", gradient_checks},
      {"encode/decode roundtrips", roundtrips},
      {"postprocess vs oracles", postprocess_oracles},
      {"assignment monotonicity and tiny objects", assignment},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %zu. %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
