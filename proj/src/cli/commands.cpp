#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "obbreg/assign.hpp"
#include "obbreg/cli.hpp"
#include "obbreg/codec.hpp"
#include "obbreg/geometry.hpp"
#include "obbreg/oracles.hpp"
#include "obbreg/postprocess.hpp"

namespace obbreg::cli {
namespace {

using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

LossMode parse_loss(const std::string& s) {
  if (s == "l1") return LossMode::L1;
  if (s == "smooth-l1") return LossMode::SmoothL1;
  return LossMode::Modulated;
}

ParamKind parse_params(const std::string& s) { return s == "8p" ? ParamKind::EightParam : ParamKind::FiveParam; }

std::vector<BoxRecord> read_file_records(const std::string& path, std::istream& in) {
  if (path == "-") return parse_records(in, "<stdin>");
  std::ifstream f(path);
  if (!f) throw InputError("cannot open input file '" + path + "'");
  return parse_records(f, path);
}

// Inline JSON object, a file path, or "-" for standard input.
BoxRecord read_single_record(const std::string& source, std::string_view option, std::istream& in) {
  const auto first = source.find_first_not_of(" \t");
  if (first != std::string::npos && source[first] == '{') return parse_record(source, option);
  auto records = read_file_records(source, in);
  if (records.empty()) throw InputError(std::string(option) + ": no record found in '" + source + "'");
  return records.front();
}

json quad_json(const Quad& q) {
  json arr = json::array();
  for (const auto& c : q.corners) {
    arr.push_back(c.x);
    arr.push_back(c.y);
  }
  return arr;
}

struct SweepArgs {
  std::string gt;
  std::string params{"5p"};
  std::string loss{"modulated"};
  std::vector<double> range{-90.0, 90.0};
  double step{0.1};
  std::vector<double> anchor;
  double beta{1.0 / 9.0};
};

int cmd_sweep(const SweepArgs& a, std::istream& in, std::ostream& out) {
  if (!(a.step > 0.0)) throw InputError("--step must be positive");
  if (a.range[1] < a.range[0]) throw InputError("--range must satisfy lo <= hi");
  const BoxRecord rec = read_single_record(a.gt, "--gt", in);
  const Quad gt_quad = record_quad(rec, "--gt");
  AnchorBox anchor = envelope_anchor(gt_quad);
  if (!a.anchor.empty()) {
    anchor = {a.anchor[0], a.anchor[1], a.anchor[2], a.anchor[3]};
    if (!(anchor.wa > 0.0) || !(anchor.ha > 0.0)) throw InputError("--anchor: wa and ha must be positive");
  }
  const SweepRange sweep{deg_to_rad(a.range[0]), deg_to_rad(a.range[1]), deg_to_rad(a.step)};
  const LossConfig cfg{a.beta};
  const LossMode mode = parse_loss(a.loss);
  const ContinuityCurve curve = parse_params(a.params) == ParamKind::FiveParam
                                    ? continuity_scan(record_rbox(rec, "--gt"), anchor, sweep, mode, cfg)
                                    : continuity_scan(gt_quad, anchor, sweep, mode, cfg);

  out << "angle_deg,loss,branch,jump\n";
  for (const auto& s : curve.samples) {
    out << num(rad_to_deg(s.angle)) << ',' << num(s.loss) << ',' << branch_name(s.branch) << ',' << num(s.jump)
        << '\n';
  }
  out << "# max_jump=" << num(curve.max_jump) << ",at_angle_deg=" << num(rad_to_deg(curve.max_jump_angle))
      << ",samples=" << curve.samples.size() << '\n';
  return kExitOk;
}

struct IouCurveArgs {
  std::string base;
  std::string param{"theta"};
  std::vector<double> range{-10.0, 10.0};
  double step{1.0};
  std::size_t mc_samples{0};
  std::uint64_t seed{0};
};

int cmd_iou_curve(const IouCurveArgs& a, std::istream& in, std::ostream& out) {
  if (!(a.step > 0.0)) throw InputError("--step must be positive");
  if (a.range[1] < a.range[0]) throw InputError("--range must satisfy lo <= hi");
  if (a.mc_samples != 0 && a.mc_samples < 10000) throw InputError("--mc-samples must be 0 or >= 10000");
  const BoxRecord rec = read_single_record(a.base, "--base", in);
  const RBox5 base = record_rbox(rec, "--base");
  const Quad base_quad = rbox5_to_quad(base);

  out << "value,iou";
  if (a.mc_samples) out << ",mc_iou,mc_stderr";
  out << '\n';
  for (double d : sweep_values({a.range[0], a.range[1], a.step})) {
    RBox5 b = base;
    double value = 0.0;
    if (a.param == "cx") {
      b.cx += d;
      value = b.cx;
    } else if (a.param == "cy") {
      b.cy += d;
      value = b.cy;
    } else if (a.param == "w") {
      b.w += d;
      value = b.w;
    } else if (a.param == "h") {
      b.h += d;
      value = b.h;
    } else {
      b.theta += deg_to_rad(d);
      value = rad_to_deg(base.theta) + d;
    }
    if (!(b.w > 0.0) || !(b.h > 0.0)) throw InputError("--range: swept width/height must stay positive");
    const Quad q = rbox5_to_quad(canonicalize_rbox5(b.cx, b.cy, b.w, b.h, b.theta));
    out << num(value) << ',' << num(rotated_iou(base_quad, q));
    if (a.mc_samples) {
      const auto est = oracles::mc_iou(base_quad, q, a.mc_samples, {a.seed});
      out << ',' << num(est.iou) << ',' << num(est.stderr_);
    }
    out << '\n';
  }
  return kExitOk;
}

struct FitArgs {
  std::string reference;
  std::string gt;
  std::string params{"5p"};
  std::string loss{"modulated"};
  int steps{2000};
  double lr{0.05};
  double eps{1e-6};
  double beta{1.0 / 9.0};
};

int cmd_fit(const FitArgs& a, std::istream& in, std::ostream& out) {
  const RBox5 reference = record_rbox(read_single_record(a.reference, "--reference", in), "--reference");
  const RBox5 gt = record_rbox(read_single_record(a.gt, "--gt", in), "--gt");
  FitOptions opts;
  opts.params = parse_params(a.params);
  opts.loss = parse_loss(a.loss);
  opts.steps = a.steps;
  opts.lr = a.lr;
  opts.eps = a.eps;
  opts.loss_cfg.smooth_l1_beta = a.beta;
  const FitResult r = fit(reference, gt, opts);

  json traj = json::array();
  for (const auto& s : r.trajectory) {
    traj.push_back({{"step", s.step},
                    {"loss", s.loss},
                    {"iou", s.iou},
                    {"branch", std::string(branch_name(s.branch))},
                    {"params", s.params}});
  }
  const FitStep& last = r.trajectory.back();
  json final_box = {{"step", last.step}, {"loss", last.loss}, {"iou", last.iou}, {"quad", quad_json(r.final_quad)}};
  if (opts.params == ParamKind::FiveParam) {
    const RBox5 b = decode_rbox5({last.params[0], last.params[1], last.params[2], last.params[3], last.params[4]},
                                 r.anchor);
    final_box["rbox"] = {b.cx, b.cy, b.w, b.h, rad_to_deg(b.theta)};
  }
  const FitStep& best = r.trajectory[r.best_index];
  json best_box = {{"step", best.step}, {"loss", best.loss}, {"iou", best.iou}, {"quad", quad_json(r.best_quad)}};
  json doc = {{"params", a.params},
              {"loss", a.loss},
              {"lr", a.lr},
              {"steps", a.steps},
              {"anchor", {r.anchor.xa, r.anchor.ya, r.anchor.wa, r.anchor.ha}},
              {"converged_step", r.converged_step ? json(*r.converged_step) : json(nullptr)},
              {"final", final_box},
              {"best", best_box},
              {"trajectory", traj}};
  out << doc.dump() << '\n';
  return kExitOk;
}

struct AssignArgs {
  std::vector<double> grid;  // width height stride
  std::vector<double> origin;
  std::string gts;
  double alpha{0.8};
};

int cmd_assign(const AssignArgs& a, std::istream& in, std::ostream& out) {
  FeatureGrid g;
  if (a.grid[0] < 1 || a.grid[1] < 1 || a.grid[0] != std::floor(a.grid[0]) || a.grid[1] != std::floor(a.grid[1])) {
    throw InputError("--grid: width and height must be positive integers");
  }
  if (!(a.grid[2] > 0.0)) throw InputError("--grid: stride must be positive");
  if (!(a.alpha > 0.0)) throw InputError("--alpha must be positive");
  g.width = static_cast<int>(a.grid[0]);
  g.height = static_cast<int>(a.grid[1]);
  g.stride = a.grid[2];
  g.origin = a.origin.empty() ? Point2{0.5 * g.stride, 0.5 * g.stride} : Point2{a.origin[0], a.origin[1]};

  std::vector<Quad> gts;
  const auto records = read_file_records(a.gts, in);
  for (std::size_t i = 0; i < records.size(); ++i) {
    gts.push_back(record_quad(records[i], "--gts record " + std::to_string(i + 1)));
  }
  const auto pts = grid_points(g);
  const auto labels = assign(pts, gts, {a.alpha});

  std::size_t pos = 0, ign = 0, neg = 0;
  out << "px,py,label,gt_index\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const char* name = "negative";
    switch (labels[i].kind) {
      case LabelKind::Positive:
        name = "positive";
        ++pos;
        break;
      case LabelKind::Ignore:
        name = "ignore";
        ++ign;
        break;
      case LabelKind::Negative:
        ++neg;
        break;
    }
    out << num(pts[i].x) << ',' << num(pts[i].y) << ',' << name << ',' << labels[i].gt_index << '\n';
  }
  out << "# positives=" << pos << ",ignores=" << ign << ",negatives=" << neg << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string dets;
  std::string gts;
  std::vector<std::string> protocols{"ap50"};
  double nms_iou{0.5};
};

std::vector<double> protocol_thresholds(const std::string& name) {
  if (name == "ap50") return EvalProtocol::ap50().iou_thresholds;
  if (name == "ap75") return EvalProtocol::ap75().iou_thresholds;
  return EvalProtocol::ap50_95().iou_thresholds;
}

std::string metric_name(const std::string& protocol) {
  if (protocol == "ap50") return "AP50";
  if (protocol == "ap75") return "AP75";
  return "AP50:95";
}

int cmd_eval(const EvalArgs& a, std::istream& in, std::ostream& out) {
  if (!(a.nms_iou > 0.0 && a.nms_iou < 1.0)) throw InputError("--nms-iou must lie in (0, 1)");
  if (a.dets == "-" && a.gts == "-") throw InputError("--dets and --gts cannot both read standard input");

  std::vector<Detection> dets;
  const auto det_records = read_file_records(a.dets, in);
  for (std::size_t i = 0; i < det_records.size(); ++i) {
    const std::string where = "--dets record " + std::to_string(i + 1);
    const auto& r = det_records[i];
    if (!r.score) throw InputError(where + ": field \"score\" is required for detections");
    dets.push_back({record_quad(r, where), *r.score, r.class_id.value_or(0)});
  }
  std::map<int, std::vector<Quad>> gts_by_class;
  const auto gt_records = read_file_records(a.gts, in);
  for (std::size_t i = 0; i < gt_records.size(); ++i) {
    const auto& r = gt_records[i];
    gts_by_class[r.class_id.value_or(0)].push_back(record_quad(r, "--gts record " + std::to_string(i + 1)));
  }

  std::set<double> ladder;
  for (const auto& p : a.protocols) {
    for (double t : protocol_thresholds(p)) ladder.insert(t);
  }
  const EvalProtocol protocol{{ladder.begin(), ladder.end()}};

  std::set<int> classes;
  for (const auto& d : dets) classes.insert(d.class_id);
  for (const auto& [c, _] : gts_by_class) classes.insert(c);

  std::vector<double> ap_sum(protocol.iou_thresholds.size(), 0.0);
  std::size_t scored_classes = 0;
  json per_class = json::array();
  for (int c : classes) {
    std::vector<Detection> class_dets;
    for (const auto& d : dets) {
      if (d.class_id == c) class_dets.push_back(d);
    }
    std::vector<Detection> kept;
    for (std::size_t i : rnms(class_dets, a.nms_iou)) kept.push_back(class_dets[i]);
    const auto& class_gts = gts_by_class[c];
    const APResult res = average_precision(kept, class_gts, protocol);
    if (!class_gts.empty()) {
      ++scored_classes;
      for (std::size_t i = 0; i < ap_sum.size(); ++i) ap_sum[i] += res.ap[i];
    }
    per_class.push_back({{"class_id", c},
                         {"num_gts", class_gts.size()},
                         {"num_dets", class_dets.size()},
                         {"num_kept", kept.size()},
                         {"ap", res.ap},
                         {"mean", res.mean}});
  }

  std::vector<double> ap(ap_sum.size(), 0.0);
  if (scored_classes > 0) {
    for (std::size_t i = 0; i < ap.size(); ++i) ap[i] = ap_sum[i] / static_cast<double>(scored_classes);
  }
  auto mean_over = [&](const std::vector<double>& thresholds) {
    double s = 0.0;
    for (double t : thresholds) {
      const auto it = std::find(protocol.iou_thresholds.begin(), protocol.iou_thresholds.end(), t);
      s += ap[static_cast<std::size_t>(it - protocol.iou_thresholds.begin())];
    }
    return s / static_cast<double>(thresholds.size());
  };
  json metrics = json::object();
  for (const auto& p : a.protocols) metrics[metric_name(p)] = mean_over(protocol_thresholds(p));

  json doc = {{"thresholds", protocol.iou_thresholds},
              {"nms_iou", a.nms_iou},
              {"ap", ap},
              {"mean", mean_over(protocol.iou_thresholds)},
              {"metrics", metrics},
              {"classes", per_class}};
  out << doc.dump() << '\n';
  return kExitOk;
}

struct OrderArgs {
  std::vector<double> points;
  std::string input;
};

int cmd_order(const OrderArgs& a, std::istream& in, std::ostream& out) {
  Quad q;
  if (!a.points.empty()) {
    const auto& v = a.points;
    try {
      q = order_corners({Point2{v[0], v[1]}, Point2{v[2], v[3]}, Point2{v[4], v[5]}, Point2{v[6], v[7]}});
    } catch (const DegenerateQuad& e) {
      throw InputError(std::string("--points: ") + e.what());
    }
  } else {
    q = record_quad(read_single_record(a.input.empty() ? "-" : a.input, "--input", in), "--input");
  }
  out << json{{"quad", quad_json(q)}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rotated-box regression geometry, losses, assignment and evaluation", "obbreg"};
  app.require_subcommand(1);
  const std::vector<std::string> loss_names{"l1", "smooth-l1", "modulated"};
  const std::vector<std::string> param_kinds{"5p", "8p"};

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Loss along a rigid rotation of a ground-truth box (CSV)");
  sweep->add_option("--gt", sweep_args.gt, "Ground-truth record: inline JSON, file path or '-'")->required();
  sweep->add_option("--params", sweep_args.params, "Parameterisation")->check(CLI::IsMember(param_kinds));
  sweep->add_option("--loss", sweep_args.loss, "Loss")->check(CLI::IsMember(loss_names));
  sweep->add_option("--range", sweep_args.range, "Rotation offsets LO HI in degrees")->expected(2);
  sweep->add_option("--step", sweep_args.step, "Rotation step in degrees");
  sweep->add_option("--anchor", sweep_args.anchor, "Anchor XA YA WA HA (default: envelope of gt)")->expected(4);
  sweep->add_option("--beta", sweep_args.beta, "smooth-l1 transition point");

  IouCurveArgs iou_args;
  auto* iou = app.add_subcommand("iou-curve", "IoU against the base box while one parameter varies (CSV)");
  iou->add_option("--base", iou_args.base, "Base record: inline JSON, file path or '-'")->required();
  iou->add_option("--param", iou_args.param, "Swept parameter")
      ->check(CLI::IsMember({"cx", "cy", "w", "h", "theta"}));
  iou->add_option("--range", iou_args.range, "Offsets LO HI (pixels, degrees for theta)")->expected(2);
  iou->add_option("--step", iou_args.step, "Offset step");
  iou->add_option("--mc-samples", iou_args.mc_samples, "Add a Monte Carlo IoU column with N samples");
  iou->add_option("--seed", iou_args.seed, "Monte Carlo seed");

  FitArgs fit_args;
  auto* fitc = app.add_subcommand("fit", "Gradient-descent regression from a reference box to a target (JSON)");
  fitc->add_option("--reference", fit_args.reference, "Reference record")->required();
  fitc->add_option("--gt", fit_args.gt, "Target record")->required();
  fitc->add_option("--params", fit_args.params, "Parameterisation")->check(CLI::IsMember(param_kinds));
  fitc->add_option("--loss", fit_args.loss, "Loss")->check(CLI::IsMember(loss_names));
  fitc->add_option("--steps", fit_args.steps, "Maximum number of updates")->check(CLI::PositiveNumber);
  fitc->add_option("--lr", fit_args.lr, "Learning rate")->check(CLI::PositiveNumber);
  fitc->add_option("--eps", fit_args.eps, "Finite-difference step")->check(CLI::PositiveNumber);
  fitc->add_option("--beta", fit_args.beta, "smooth-l1 transition point")->check(CLI::PositiveNumber);

  AssignArgs assign_args;
  auto* asg = app.add_subcommand("assign", "Point-based positive/ignore/negative labels on a grid (CSV)");
  asg->add_option("--grid", assign_args.grid, "WIDTH HEIGHT STRIDE")->expected(3)->required();
  asg->add_option("--origin", assign_args.origin, "Centre of cell (0,0); default stride/2")->expected(2);
  asg->add_option("--gts", assign_args.gts, "Ground-truth JSON-lines file or '-'")->required();
  asg->add_option("--alpha", assign_args.alpha, "Centre-distance factor");

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "Rotated NMS followed by average precision (JSON)");
  ev->add_option("--dets", eval_args.dets, "Detection JSON-lines file or '-'")->required();
  ev->add_option("--gts", eval_args.gts, "Ground-truth JSON-lines file or '-'")->required();
  ev->add_option("--protocol", eval_args.protocols, "ap50, ap75 or ap50-95 (repeatable)")
      ->check(CLI::IsMember({"ap50", "ap75", "ap50-95"}));
  ev->add_option("--nms-iou", eval_args.nms_iou, "R-NMS IoU threshold");

  OrderArgs order_args;
  auto* ord = app.add_subcommand("order", "Clockwise corner ordering from the leftmost vertex (JSON)");
  ord->add_option("--points", order_args.points, "X1 Y1 X2 Y2 X3 Y3 X4 Y4")->expected(8);
  ord->add_option("--input", order_args.input, "Quad record: inline JSON, file path or '-' (default)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  try {
    if (sweep->parsed()) return cmd_sweep(sweep_args, in, out);
    if (iou->parsed()) return cmd_iou_curve(iou_args, in, out);
    if (fitc->parsed()) return cmd_fit(fit_args, in, out);
    if (asg->parsed()) return cmd_assign(assign_args, in, out);
    if (ev->parsed()) return cmd_eval(eval_args, in, out);
    if (ord->parsed()) return cmd_order(order_args, in, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DegenerateQuad& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace obbreg::cli
