#include <cmath>
#include <functional>

#include "obbreg/cli.hpp"
#include "obbreg/codec.hpp"
#include "obbreg/geometry.hpp"

namespace obbreg::cli {
namespace {

// A loss is treated as converged once it is indistinguishable from zero.
constexpr double kConvergedLoss = 1e-12;

struct Problem {
  std::function<LossValue(std::span<const double>)> loss;
  std::function<Quad(std::span<const double>)> decode;
  std::vector<double> start;
};

EncodedRBox5 as_rbox_encoding(std::span<const double> x) { return {x[0], x[1], x[2], x[3], x[4]}; }

EncodedQuad as_quad_encoding(std::span<const double> x) {
  EncodedQuad e;
  for (int i = 0; i < 4; ++i) e.offsets[i] = {x[2 * i], x[2 * i + 1]};
  return e;
}

Problem five_param(const RBox5& reference, const RBox5& gt, const AnchorBox& anchor, const FitOptions& opts) {
  const EncodedRBox5 start = encode_rbox5(reference, anchor);
  const EncodedRBox5 target = encode_rbox5(gt, anchor);
  Problem p;
  p.start = {start.tx, start.ty, start.tw, start.th, start.ttheta};
  p.loss = [=](std::span<const double> x) -> LossValue {
    const EncodedRBox5 e = as_rbox_encoding(x);
    switch (opts.loss) {
      case LossMode::L1:
        return l1_encoded_5p(e, target);
      case LossMode::SmoothL1:
        return {smooth_l1(residuals_5p(e, target), opts.loss_cfg), Branch::Direct};
      case LossMode::Modulated:
        break;
    }
    return modulated_5p(e, target, anchor);
  };
  p.decode = [=](std::span<const double> x) { return rbox5_to_quad(decode_rbox5(as_rbox_encoding(x), anchor)); };
  return p;
}

Problem eight_param(const RBox5& reference, const RBox5& gt, const AnchorBox& anchor, const FitOptions& opts) {
  const EncodedQuad start = encode_quad(rbox5_to_quad(reference), anchor);
  const Quad target = rbox5_to_quad(gt);
  Problem p;
  for (const auto& o : start.offsets) {
    p.start.push_back(o.x);
    p.start.push_back(o.y);
  }
  p.loss = [=](std::span<const double> x) -> LossValue {
    const Quad q = decode_quad(as_quad_encoding(x), anchor);
    switch (opts.loss) {
      case LossMode::L1:
        return l1_8p(q, target, anchor);
      case LossMode::SmoothL1:
        return {smooth_l1(residuals_8p(q, target, anchor), opts.loss_cfg), Branch::Shift0};
      case LossMode::Modulated:
        break;
    }
    return modulated_8p(q, target, anchor);
  };
  p.decode = [=](std::span<const double> x) {
    return order_corners(decode_quad(as_quad_encoding(x), anchor).corners);
  };
  return p;
}

}  // namespace

FitResult fit(const RBox5& reference, const RBox5& gt, const FitOptions& opts) {
  if (opts.steps < 1) throw InputError("fit: steps must be >= 1");
  if (!(opts.lr > 0.0) || !std::isfinite(opts.lr)) throw InputError("fit: lr must be positive");
  if (!(opts.eps > 0.0)) throw InputError("fit: eps must be positive");

  const RBox5 ref = canonicalize_rbox5(reference.cx, reference.cy, reference.w, reference.h, reference.theta);
  const RBox5 target = canonicalize_rbox5(gt.cx, gt.cy, gt.w, gt.h, gt.theta);
  const Quad target_quad = rbox5_to_quad(target);

  FitResult result;
  result.anchor = envelope_anchor(rbox5_to_quad(ref));
  Problem problem = opts.params == ParamKind::FiveParam ? five_param(ref, target, result.anchor, opts)
                                                        : eight_param(ref, target, result.anchor, opts);

  const ScalarFn scalar = [&](std::span<const double> x) { return problem.loss(x).value; };
  std::vector<double> x = problem.start;
  for (int step = 0;; ++step) {
    const LossValue lv = problem.loss(x);
    if (!std::isfinite(lv.value)) throw NumericError("fit: loss became non-finite at step " + std::to_string(step));

    Quad current;
    double iou = 0.0;
    try {
      current = problem.decode(x);
      iou = rotated_iou(current, target_quad);
    } catch (const Overflow& e) {
      throw NumericError(std::string("fit: ") + e.what() + " at step " + std::to_string(step));
    } catch (const DegenerateQuad&) {
      // A collapsed prediction has no overlap with the target.
      current = decode_quad(as_quad_encoding(x), result.anchor);
    }
    result.trajectory.push_back({step, lv.value, iou, lv.active_branch, x});
    result.final_quad = current;
    if (lv.value < result.trajectory[result.best_index].loss) {
      result.best_index = result.trajectory.size() - 1;
      result.best_quad = current;
    } else if (result.trajectory.size() == 1) {
      result.best_quad = current;
    }

    if (lv.value <= kConvergedLoss) {
      result.converged_step = step;
      break;
    }
    if (step == opts.steps) break;

    const auto grad = finite_diff_grad(scalar, x, opts.eps);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!std::isfinite(grad[i])) throw NumericError("fit: gradient became non-finite at step " + std::to_string(step));
      x[i] -= opts.lr * grad[i];
    }
  }
  return result;
}

}  // namespace obbreg::cli
