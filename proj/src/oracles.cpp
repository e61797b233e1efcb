#include "obbreg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace obbreg::oracles {
namespace {

double cr(const Point2& o, const Point2& a, const Point2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double shoelace(const std::vector<Point2>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2& p = v[i];
    const Point2& q = v[(i + 1) % v.size()];
    s += p.x * q.y - q.x * p.y;
  }
  return 0.5 * std::abs(s);
}

double quad_area_ref(const Quad& q) { return shoelace({q.corners.begin(), q.corners.end()}); }

// Unit interval double from the top 53 bits.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Strict total order: score descending, index ascending.
std::vector<std::size_t> rank(std::span<const Detection> dets) {
  std::vector<std::size_t> remaining(dets.size());
  for (std::size_t i = 0; i < dets.size(); ++i) remaining[i] = i;
  std::vector<std::size_t> out;
  while (!remaining.empty()) {
    std::size_t pick = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      const auto& c = dets[remaining[k]];
      const auto& b = dets[remaining[pick]];
      if (c.score > b.score || (c.score == b.score && remaining[k] < remaining[pick])) pick = k;
    }
    out.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

}  // namespace

bool contains(const Quad& q, const Point2& p) {
  bool any_pos = false;
  bool any_neg = false;
  for (int i = 0; i < 4; ++i) {
    const double c = cr(q.corners[i], q.corners[(i + 1) % 4], p);
    any_pos |= c > 0.0;
    any_neg |= c < 0.0;
  }
  return !(any_pos && any_neg);
}

McEstimate mc_iou(const Quad& a, const Quad& b, std::size_t samples, RngSeed seed) {
  if (samples < 10000) throw InvalidInput("mc_iou: at least 10^4 samples required");
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
  double x1 = -x0, y1 = -x0;
  for (const Quad* q : {&a, &b}) {
    for (const auto& c : q->corners) {
      x0 = std::min(x0, c.x);
      x1 = std::max(x1, c.x);
      y0 = std::min(y0, c.y);
      y1 = std::max(y1, c.y);
    }
  }
  std::mt19937_64 rng(seed.seed);
  McEstimate est;
  for (std::size_t s = 0; s < samples; ++s) {
    const Point2 p{x0 + (x1 - x0) * unit(rng), y0 + (y1 - y0) * unit(rng)};
    const bool ia = contains(a, p);
    const bool ib = contains(b, p);
    est.union_hits += (ia || ib) ? 1 : 0;
    est.inter_hits += (ia && ib) ? 1 : 0;
  }
  if (est.union_hits > 0) {
    const double n = static_cast<double>(est.union_hits);
    est.iou = static_cast<double>(est.inter_hits) / n;
    est.stderr_ = std::sqrt(est.iou * (1.0 - est.iou) / n);
  }
  return est;
}

Quad hull_order(const std::array<Point2, 4>& points) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        const Point2 &p = points[i], &q = points[j], &r = points[k];
        const double lpq = std::hypot(q.x - p.x, q.y - p.y);
        const double lpr = std::hypot(r.x - p.x, r.y - p.y);
        if (std::abs(cr(p, q, r)) <= 1e-9 * lpq * lpr) {
          throw DegenerateQuad("hull_order: collinear or coincident points");
        }
      }
    }
  }
  Point2 c{};
  for (const auto& p : points) {
    c.x += 0.25 * p.x;
    c.y += 0.25 * p.y;
  }
  std::array<Point2, 4> v = points;
  // Increasing atan2 is visually clockwise when y points down.
  std::sort(v.begin(), v.end(), [&](const Point2& p, const Point2& q) {
    return std::atan2(p.y - c.y, p.x - c.x) < std::atan2(q.y - c.y, q.x - c.x);
  });

  double lo_x = v[0].x, hi_x = v[0].x, lo_y = v[0].y, hi_y = v[0].y;
  for (const auto& p : v) {
    lo_x = std::min(lo_x, p.x);
    hi_x = std::max(hi_x, p.x);
    lo_y = std::min(lo_y, p.y);
    hi_y = std::max(hi_y, p.y);
  }
  const double tie = 1e-9 * std::max(1.0, std::max(hi_x - lo_x, hi_y - lo_y));
  double min_x = v[0].x;
  for (const auto& p : v) min_x = std::min(min_x, p.x);
  int start = -1;
  for (int i = 0; i < 4; ++i) {
    if (v[i].x <= min_x + tie && (start < 0 || v[i].y < v[start].y)) start = i;
  }
  Quad q;
  for (int i = 0; i < 4; ++i) q.corners[i] = v[(start + i) % 4];
  return q;
}

double exact_iou(const Quad& a, const Quad& b) {
  std::vector<Point2> pts;
  for (const auto& p : a.corners) {
    if (contains(b, p)) pts.push_back(p);
  }
  for (const auto& p : b.corners) {
    if (contains(a, p)) pts.push_back(p);
  }
  for (int i = 0; i < 4; ++i) {
    const Point2 p = a.corners[i];
    const Point2 r{a.corners[(i + 1) % 4].x - p.x, a.corners[(i + 1) % 4].y - p.y};
    for (int j = 0; j < 4; ++j) {
      const Point2 q = b.corners[j];
      const Point2 s{b.corners[(j + 1) % 4].x - q.x, b.corners[(j + 1) % 4].y - q.y};
      const double denom = r.x * s.y - r.y * s.x;
      if (denom == 0.0) continue;
      const double t = ((q.x - p.x) * s.y - (q.y - p.y) * s.x) / denom;
      const double u = ((q.x - p.x) * r.y - (q.y - p.y) * r.x) / denom;
      if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) pts.push_back({p.x + t * r.x, p.y + t * r.y});
    }
  }
  double inter = 0.0;
  if (pts.size() >= 3) {
    Point2 c{};
    for (const auto& p : pts) {
      c.x += p.x / static_cast<double>(pts.size());
      c.y += p.y / static_cast<double>(pts.size());
    }
    std::sort(pts.begin(), pts.end(), [&](const Point2& p, const Point2& q) {
      return std::atan2(p.y - c.y, p.x - c.x) < std::atan2(q.y - c.y, q.x - c.x);
    });
    inter = shoelace(pts);
  }
  const double uni = quad_area_ref(a) + quad_area_ref(b) - inter;
  if (!(uni > 0.0)) return 0.0;
  return std::min(1.0, std::max(0.0, inter / uni));
}

std::vector<std::size_t> brute_nms(std::span<const Detection> dets, double iou_threshold) {
  std::vector<std::size_t> kept;
  for (std::size_t i : rank(dets)) {
    bool keep = true;
    for (std::size_t k : kept) {
      if (dets[k].class_id == dets[i].class_id && exact_iou(dets[k].quad, dets[i].quad) >= iou_threshold) {
        keep = false;
        break;
      }
    }
    if (keep) kept.push_back(i);
  }
  return kept;
}

APResult reference_ap(std::span<const Detection> dets, std::span<const Quad> gts,
                      const EvalProtocol& protocol) {
  const auto order = rank(dets);
  APResult out;
  out.thresholds = protocol.iou_thresholds;
  for (double thr : protocol.iou_thresholds) {
    std::vector<int> owner(gts.size(), -1);
    std::vector<int> tp_flags;
    for (std::size_t r = 0; r < order.size(); ++r) {
      int best = -1;
      double best_v = -1.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (owner[g] >= 0) continue;
        const double v = exact_iou(dets[order[r]].quad, gts[g]);
        if (v >= thr && v > best_v) {
          best = static_cast<int>(g);
          best_v = v;
        }
      }
      if (best >= 0) owner[static_cast<std::size_t>(best)] = static_cast<int>(r);
      tp_flags.push_back(best >= 0 ? 1 : 0);
    }

    double ap = 0.0;
    if (!gts.empty()) {
      const auto n = tp_flags.size();
      auto tp_upto = [&](std::size_t k) {
        std::size_t c = 0;
        for (std::size_t j = 0; j <= k; ++j) c += static_cast<std::size_t>(tp_flags[j]);
        return c;
      };
      double prev_recall = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        double envelope = 0.0;
        for (std::size_t j = k; j < n; ++j) {
          envelope = std::max(envelope, static_cast<double>(tp_upto(j)) / static_cast<double>(j + 1));
        }
        const double recall = static_cast<double>(tp_upto(k)) / static_cast<double>(gts.size());
        ap += (recall - prev_recall) * envelope;
        prev_recall = recall;
      }
    }
    out.ap.push_back(ap);
  }
  double sum = 0.0;
  for (double v : out.ap) sum += v;
  out.mean = out.ap.empty() ? 0.0 : sum / static_cast<double>(out.ap.size());
  return out;
}

}  // namespace obbreg::oracles
