#include <pybind11/functional.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "obbreg/assign.hpp"
#include "obbreg/cli.hpp"
#include "obbreg/codec.hpp"
#include "obbreg/geometry.hpp"
#include "obbreg/loss.hpp"
#include "obbreg/postprocess.hpp"

namespace py = pybind11;
using namespace obbreg;

namespace {

Quad quad_from_seq(const std::vector<double>& v) {
  if (v.size() != 8) throw InvalidInput("a quad needs 8 coordinates");
  return {{Point2{v[0], v[1]}, Point2{v[2], v[3]}, Point2{v[4], v[5]}, Point2{v[6], v[7]}}};
}

std::vector<double> quad_to_seq(const Quad& q) {
  std::vector<double> v;
  for (const auto& c : q.corners) {
    v.push_back(c.x);
    v.push_back(c.y);
  }
  return v;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rotated bounding-box geometry, regression losses, assignment and evaluation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<DegenerateQuad>(m, "DegenerateQuad", base.ptr());
  py::register_exception<NotARectangle>(m, "NotARectangle", base.ptr());
  py::register_exception<Overflow>(m, "Overflow", base.ptr());
  py::register_exception<AnchorMismatch>(m, "AnchorMismatch", base.ptr());

  py::class_<Point2>(m, "Point2")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Point2::x)
      .def_readwrite("y", &Point2::y)
      .def(py::self == py::self)
      .def("__repr__", [](const Point2& p) {
        std::ostringstream s;
        s << "Point2(" << p.x << ", " << p.y << ")";
        return s.str();
      });

  py::class_<RBox5>(m, "RBox5")
      .def(py::init<double, double, double, double, double>(), py::arg("cx"), py::arg("cy"), py::arg("w"),
           py::arg("h"), py::arg("theta"))
      .def_readwrite("cx", &RBox5::cx)
      .def_readwrite("cy", &RBox5::cy)
      .def_readwrite("w", &RBox5::w)
      .def_readwrite("h", &RBox5::h)
      .def_readwrite("theta", &RBox5::theta)
      .def(py::self == py::self)
      .def("astuple", [](const RBox5& b) { return py::make_tuple(b.cx, b.cy, b.w, b.h, b.theta); })
      .def("__repr__", [](const RBox5& b) {
        std::ostringstream s;
        s << "RBox5(" << b.cx << ", " << b.cy << ", " << b.w << ", " << b.h << ", " << b.theta << ")";
        return s.str();
      });

  py::class_<AnchorBox>(m, "AnchorBox")
      .def(py::init<double, double, double, double>(), py::arg("xa"), py::arg("ya"), py::arg("wa"), py::arg("ha"))
      .def_readwrite("xa", &AnchorBox::xa)
      .def_readwrite("ya", &AnchorBox::ya)
      .def_readwrite("wa", &AnchorBox::wa)
      .def_readwrite("ha", &AnchorBox::ha)
      .def(py::self == py::self);

  py::class_<EncodedRBox5>(m, "EncodedRBox5")
      .def(py::init<double, double, double, double, double>(), py::arg("tx"), py::arg("ty"), py::arg("tw"),
           py::arg("th"), py::arg("ttheta"))
      .def_readwrite("tx", &EncodedRBox5::tx)
      .def_readwrite("ty", &EncodedRBox5::ty)
      .def_readwrite("tw", &EncodedRBox5::tw)
      .def_readwrite("th", &EncodedRBox5::th)
      .def_readwrite("ttheta", &EncodedRBox5::ttheta);

  py::class_<QuadExtent>(m, "QuadExtent")
      .def_readonly("xc", &QuadExtent::xc)
      .def_readonly("yc", &QuadExtent::yc)
      .def_readonly("w", &QuadExtent::w)
      .def_readonly("h", &QuadExtent::h);

  py::enum_<Branch>(m, "Branch")
      .value("Direct", Branch::Direct)
      .value("Swapped", Branch::Swapped)
      .value("ShiftMinus1", Branch::ShiftMinus1)
      .value("Shift0", Branch::Shift0)
      .value("ShiftPlus1", Branch::ShiftPlus1);

  py::class_<LossValue>(m, "LossValue")
      .def_readonly("value", &LossValue::value)
      .def_readonly("branch", &LossValue::active_branch);

  py::enum_<LabelKind>(m, "LabelKind")
      .value("Negative", LabelKind::Negative)
      .value("Ignore", LabelKind::Ignore)
      .value("Positive", LabelKind::Positive);

  // Quads cross the boundary as flat [x1, y1, ..., x4, y4] lists.
  m.def(
      "order_corners", [](const std::vector<double>& v) { return quad_to_seq(order_corners(quad_from_seq(v).corners)); },
      py::arg("points"));
  m.def("rbox5_to_quad", [](const RBox5& b) { return quad_to_seq(rbox5_to_quad(b)); }, py::arg("box"));
  m.def("quad_to_rbox5", [](const std::vector<double>& q) { return quad_to_rbox5(quad_from_seq(q)); }, py::arg("quad"));
  m.def("canonicalize_rbox5", &canonicalize_rbox5, py::arg("cx"), py::arg("cy"), py::arg("w"), py::arg("h"),
        py::arg("theta"));
  m.def("quad_area", [](const std::vector<double>& q) { return quad_area(quad_from_seq(q)); }, py::arg("quad"));
  m.def(
      "rotated_iou",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return rotated_iou(quad_from_seq(a), quad_from_seq(b));
      },
      py::arg("a"), py::arg("b"));
  m.def(
      "point_in_quad", [](double x, double y, const std::vector<double>& q) { return point_in_quad({x, y}, quad_from_seq(q)); },
      py::arg("x"), py::arg("y"), py::arg("quad"));
  m.def("quad_center_extent", [](const std::vector<double>& q) { return quad_center_extent(quad_from_seq(q)); },
        py::arg("quad"));

  m.def("encode_rbox5", &encode_rbox5, py::arg("box"), py::arg("anchor"));
  m.def("decode_rbox5", &decode_rbox5, py::arg("enc"), py::arg("anchor"));
  m.def(
      "encode_quad",
      [](const std::vector<double>& q, const AnchorBox& a) {
        std::vector<double> v;
        for (const auto& o : encode_quad(quad_from_seq(q), a).offsets) {
          v.push_back(o.x);
          v.push_back(o.y);
        }
        return v;
      },
      py::arg("quad"), py::arg("anchor"));
  m.def(
      "decode_quad",
      [](const std::vector<double>& e, const AnchorBox& a) {
        const Quad raw = quad_from_seq(e);
        EncodedQuad enc;
        enc.offsets = raw.corners;
        return quad_to_seq(decode_quad(enc, a));
      },
      py::arg("offsets"), py::arg("anchor"));

  m.def("l1_5p", &l1_5p, py::arg("pred"), py::arg("target"));
  m.def("modulated_5p_abs", &modulated_5p_abs, py::arg("pred"), py::arg("target"));
  m.def("l1_encoded_5p", &l1_encoded_5p, py::arg("pred"), py::arg("target"));
  m.def("modulated_5p", py::overload_cast<const EncodedRBox5&, const EncodedRBox5&, const AnchorBox&>(&modulated_5p),
        py::arg("pred"), py::arg("target"), py::arg("anchor"));
  m.def(
      "l1_8p",
      [](const std::vector<double>& p, const std::vector<double>& t, const AnchorBox& a) {
        return l1_8p(quad_from_seq(p), quad_from_seq(t), a);
      },
      py::arg("pred"), py::arg("target"), py::arg("anchor"));
  m.def(
      "modulated_8p",
      [](const std::vector<double>& p, const std::vector<double>& t, const AnchorBox& a) {
        return modulated_8p(quad_from_seq(p), quad_from_seq(t), a);
      },
      py::arg("pred"), py::arg("target"), py::arg("anchor"));
  m.def(
      "smooth_l1", [](const std::vector<double>& r, double beta) { return smooth_l1(r, LossConfig{beta}); },
      py::arg("residuals"), py::arg("beta") = 1.0 / 9.0);
  m.def(
      "finite_diff_grad",
      [](const std::function<double(std::vector<double>)>& f, const std::vector<double>& x, double eps) {
        return finite_diff_grad(
            [&](std::span<const double> p) { return f(std::vector<double>(p.begin(), p.end())); }, x, eps);
      },
      py::arg("fn"), py::arg("point"), py::arg("eps") = 1e-6);

  m.def(
      "assign",
      [](const std::vector<std::pair<double, double>>& points, const std::vector<std::vector<double>>& gts,
         double alpha) {
        std::vector<Point2> pts;
        for (const auto& [x, y] : points) pts.push_back({x, y});
        std::vector<Quad> quads;
        for (const auto& g : gts) quads.push_back(quad_from_seq(g));
        std::vector<std::pair<LabelKind, int>> out;
        for (const auto& l : assign(pts, quads, {alpha})) out.emplace_back(l.kind, l.gt_index);
        return out;
      },
      py::arg("points"), py::arg("gts"), py::arg("alpha") = 0.8);

  auto to_dets = [](const std::vector<std::vector<double>>& quads, const std::vector<double>& scores,
                    const std::vector<int>& classes) {
    if (quads.size() != scores.size() || (!classes.empty() && classes.size() != quads.size())) {
      throw InvalidInput("quads, scores and classes must have equal length");
    }
    std::vector<Detection> dets;
    for (std::size_t i = 0; i < quads.size(); ++i) {
      dets.push_back({quad_from_seq(quads[i]), scores[i], classes.empty() ? 0 : classes[i]});
    }
    return dets;
  };
  m.def(
      "rnms",
      [to_dets](const std::vector<std::vector<double>>& quads, const std::vector<double>& scores, double iou,
                const std::vector<int>& classes) { return rnms(to_dets(quads, scores, classes), iou); },
      py::arg("quads"), py::arg("scores"), py::arg("iou_threshold") = 0.5, py::arg("classes") = std::vector<int>{});
  m.def(
      "average_precision",
      [to_dets](const std::vector<std::vector<double>>& quads, const std::vector<double>& scores,
                const std::vector<std::vector<double>>& gts, const std::vector<double>& thresholds) {
        std::vector<Quad> g;
        for (const auto& q : gts) g.push_back(quad_from_seq(q));
        const APResult r = average_precision(to_dets(quads, scores, {}), g, {thresholds});
        return py::make_tuple(r.ap, r.mean);
      },
      py::arg("quads"), py::arg("scores"), py::arg("gts"), py::arg("thresholds") = std::vector<double>{0.5});

  m.def(
      "fit",
      [](const RBox5& reference, const RBox5& gt, const std::string& params, const std::string& loss, int steps,
         double lr) {
        cli::FitOptions o;
        o.params = params == "8p" ? cli::ParamKind::EightParam : cli::ParamKind::FiveParam;
        o.loss = loss == "l1" ? LossMode::L1 : loss == "smooth-l1" ? LossMode::SmoothL1 : LossMode::Modulated;
        o.steps = steps;
        o.lr = lr;
        const cli::FitResult r = cli::fit(reference, gt, o);
        py::list traj;
        for (const auto& s : r.trajectory) traj.append(py::make_tuple(s.step, s.loss, s.iou));
        py::dict d;
        d["trajectory"] = traj;
        d["best_index"] = r.best_index;
        d["converged_step"] = r.converged_step ? py::cast(*r.converged_step) : py::none();
        d["final_quad"] = quad_to_seq(r.final_quad);
        d["best_quad"] = quad_to_seq(r.best_quad);
        return d;
      },
      py::arg("reference"), py::arg("gt"), py::arg("params") = "5p", py::arg("loss") = "modulated",
      py::arg("steps") = 2000, py::arg("lr") = 0.05);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        const int code = cli::run(args, in, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
