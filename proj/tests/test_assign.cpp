#include <gtest/gtest.h>

#include <cmath>

#include "obbreg/assign.hpp"
#include "obbreg/geometry.hpp"
#include "obbreg/oracles.hpp"
#include "support.hpp"

namespace obbreg {
namespace {

using testing::Gen;

int count(const std::vector<AssignmentLabel>& labels, LabelKind kind, int gt = -2) {
  int n = 0;
  for (const auto& l : labels) n += l.kind == kind && (gt == -2 || l.gt_index == gt);
  return n;
}

TEST(GridPoints, Layout) {
  const auto pts = grid_points({8.0, 2, 2, {4, 4}});
  const std::vector<Point2> expected{{4, 4}, {12, 4}, {4, 12}, {12, 12}};
  EXPECT_EQ(pts, expected);
  const auto one = grid_points({8.0, 1, 1, {3, 5}});
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0], (Point2{3, 5}));
  EXPECT_EQ(grid_points({2.0, 7, 3, {}}).size(), 21u);
  EXPECT_THROW(grid_points({0.0, 1, 1, {}}), InvalidInput);
  EXPECT_THROW(grid_points({1.0, 0, 1, {}}), InvalidInput);
}

TEST(Assign, HandCases) {
  const std::vector<Quad> gts{rbox5_to_quad({8, 8, 8, 8, -kHalfPi})};
  const std::vector<Point2> pts{{5, 5}, {100, 100}};
  const auto labels = assign(pts, gts);
  EXPECT_EQ(labels[0], (AssignmentLabel{LabelKind::Positive, 0}));
  EXPECT_EQ(labels[1], (AssignmentLabel{LabelKind::Negative, -1}));
}

TEST(Assign, ThinRotatedFarEndIsIgnore) {
  const Quad q = rbox5_to_quad({0, 0, 2, 20, deg_to_rad(-45.0)});
  const QuadExtent e = quad_center_extent(q);
  // Along the long axis, 8 units from the centre.
  const RBox5 b = quad_to_rbox5(q);
  const Point2 axis = b.w > b.h ? Point2{std::cos(b.theta), std::sin(b.theta)}
                                : Point2{-std::sin(b.theta), std::cos(b.theta)};
  const Point2 p = Point2{e.xc, e.yc} + axis * 8.0;
  ASSERT_TRUE(oracles::contains(q, p));
  const bool passes = std::abs(p.x - e.xc) < 0.8 * e.w && std::abs(p.y - e.yc) < 0.8 * e.h;
  ASSERT_FALSE(passes);
  const std::vector<Quad> gts{q};
  const std::vector<Point2> pts{p};
  EXPECT_EQ(assign(pts, gts)[0].kind, LabelKind::Ignore);
}

TEST(Assign, SmallestAreaWinsThenLowestIndex) {
  const std::vector<Quad> gts{rbox5_to_quad({0, 0, 40, 40, -kHalfPi}), rbox5_to_quad({0, 0, 10, 10, -kHalfPi}),
                              rbox5_to_quad({0, 0, 10, 10, -kHalfPi})};
  const std::vector<Point2> pts{{1, 1}, {15, 15}};
  const auto labels = assign(pts, gts);
  EXPECT_EQ(labels[0], (AssignmentLabel{LabelKind::Positive, 1}));
  EXPECT_EQ(labels[1], (AssignmentLabel{LabelKind::Positive, 0}));
}

TEST(Assign, EmptyGtsAllNegative) {
  const auto pts = grid_points({4.0, 5, 5, {2, 2}});
  for (const auto& l : assign(pts, std::span<const Quad>{})) EXPECT_EQ(l.kind, LabelKind::Negative);
}

TEST(Assign, CoveringGtHasNoNegatives) {
  const auto pts = grid_points({8.0, 8, 8, {4, 4}});
  const std::vector<Quad> gts{rbox5_to_quad({32, 32, 80, 80, -kHalfPi})};
  EXPECT_EQ(count(assign(pts, gts), LabelKind::Negative), 0);
}

TEST(Assign, RejectsNonPositiveAlpha) {
  const std::vector<Point2> pts{{0, 0}};
  EXPECT_THROW(assign(pts, std::span<const Quad>{}, {0.0}), InvalidInput);
}

TEST(Assign, PositiveSetGrowsWithAlpha) {
  Gen gen(71);
  for (int n = 0; n < 200; ++n) {
    std::vector<Quad> gts;
    for (int g = 0; g < 3; ++g) gts.push_back(rbox5_to_quad(gen.rbox(40.0, 2.0, 40.0)));
    const auto pts = grid_points({gen.uniform(1, 6), 30, 30, {-60, -60}});
    const double a1 = gen.uniform(0.1, 1.0), a2 = a1 + gen.uniform(0.0, 1.0);
    const auto l1 = assign(pts, gts, {a1});
    const auto l2 = assign(pts, gts, {a2});
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (l1[i].kind == LabelKind::Positive) ASSERT_EQ(l2[i].kind, LabelKind::Positive);
      ASSERT_EQ(l1[i].kind == LabelKind::Negative, l2[i].kind == LabelKind::Negative);
    }
  }
}

TEST(Assign, HalvingStrideKeepsPositives) {
  Gen gen(73);
  for (int n = 0; n < 200; ++n) {
    const std::vector<Quad> gts{rbox5_to_quad(gen.rbox(20.0, 2.0, 30.0))};
    const double stride = gen.uniform(1, 8);
    const Point2 origin{gen.uniform(-40, -30), gen.uniform(-40, -30)};
    const int cells = static_cast<int>(std::ceil(80.0 / stride));
    const auto coarse = assign(grid_points({stride, cells, cells, origin}), gts);
    const auto fine = assign(grid_points({stride / 2, 2 * cells, 2 * cells, origin}), gts);
    if (count(coarse, LabelKind::Positive) > 0) ASSERT_GT(count(fine, LabelKind::Positive), 0);
  }
}

TEST(Assign, TinyObjectCounterexampleAtAlphaBound) {
  // A 10x10 square at 45 deg centred between grid points: stride 7.9 is
  // below 0.8 * 10 yet no grid point falls inside the box.
  const std::vector<Quad> gts{rbox5_to_quad({3.95, 3.95, 10, 10, deg_to_rad(-45.0)})};
  const auto pts = grid_points({7.9, 6, 6, {-15.8, -15.8}});
  const auto labels = assign(pts, gts);
  EXPECT_EQ(count(labels, LabelKind::Positive), 0);
  EXPECT_EQ(count(labels, LabelKind::Ignore), 0);
}

TEST(Assign, TinyObjectGuaranteeBelowInscribedBound) {
  // stride <= min(w, h) / sqrt(2) forces a grid point within the inscribed
  // disc, which also passes the centre test for alpha >= 0.5.
  Gen gen(79);
  for (int n = 0; n < 1000; ++n) {
    const RBox5 b{gen.uniform(-5, 5), gen.uniform(-5, 5), gen.uniform(2, 12), gen.uniform(2, 12),
                  gen.uniform(-kHalfPi, 0.0)};
    const std::vector<Quad> gts{rbox5_to_quad(b)};
    const double stride = std::min(b.w, b.h) / std::sqrt(2.0) * gen.uniform(0.5, 0.999);
    const Point2 origin{-20 + gen.uniform(0, stride), -20 + gen.uniform(0, stride)};
    const int cells = static_cast<int>(std::ceil(40.0 / stride)) + 1;
    const auto labels = assign(grid_points({stride, cells, cells, origin}), gts, {0.8});
    ASSERT_GT(count(labels, LabelKind::Positive, 0), 0) << n;
  }
}

}  // namespace
}  // namespace obbreg
