#include <gtest/gtest.h>

#include "gaudin/covering.hpp"

using namespace gaudin;

namespace {

std::vector<Rational> ints(std::initializer_list<long> v) {
  std::vector<Rational> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

const LoopResult& find(const std::vector<LoopResult>& rs, const std::string& name) {
  for (const auto& r : rs)
    if (r.loop.name == name) return r;
  throw Error("no loop " + name);
}

}  // namespace

TEST(Covering, MoveBookkeeping) {
  EXPECT_EQ(cactus_order(4, {{1, 3}}), (std::vector<std::size_t>{1, 4, 3, 2}));
  EXPECT_EQ(cactus_closure(3, {{0, 1}, {1, 2}, {0, 1}}), -1);
  EXPECT_EQ(cactus_closure(3, {{0, 1}, {0, 1}}), 1);
  EXPECT_EQ(cactus_closure(3, {{0, 1}}), 0);
  EXPECT_THROW(cactus_order(3, {{1, 1}}), Error);
  EXPECT_THROW(cactus_path(3, {{0, 2}}), Error);
  // mirroring after a reversing loop
  CactusLoop a{"a", {{0, 1}, {1, 2}, {0, 1}}}, b{"b", {{0, 1}, {0, 1}}};
  auto ab = concatenate(a, b, 3);
  EXPECT_EQ(ab.moves.back(), std::make_pair(std::size_t{1}, std::size_t{2}));
  EXPECT_EQ(cactus_closure(3, ab.moves), -1);
  for (const auto& l : closing_sequences(4, 4)) EXPECT_NE(cactus_closure(4, l.moves), 0) << l.name;
  EXPECT_EQ(closing_sequences(3, 4).size(), 2u);
  for (std::size_t n : {3u, 4u})
    for (const auto& l : cactus_catalog(n)) EXPECT_NE(cactus_closure(n, l.moves), 0) << l.name;
}

TEST(Covering, MovePathIsContinuous) {
  auto path = cactus_path(4, {{1, 3}, {0, 1}});
  ASSERT_EQ(path.segments.size(), 6u);
  for (std::size_t k = 0; k + 1 < path.segments.size(); ++k) {
    auto a = path.segments[k].points(1.0), b = path.segments[k + 1].points(0.0);
    for (std::size_t j = 0; j < a.size(); ++j) EXPECT_NEAR(a[j], b[j], 1e-14);
  }
  // the chart segment passes through the collision of the block
  auto mid = path.segments[1].points(0.5);
  EXPECT_EQ(mid[1], mid[3]);
  EXPECT_EQ(mid[1], mid[2]);
  EXPECT_EQ(path.hash(), cactus_path(4, {{1, 3}, {0, 1}}).hash());
  EXPECT_NE(path.hash(), cactus_path(4, {{1, 3}, {0, 2}}).hash());
}

TEST(Covering, ConstantAndReversedPaths) {
  auto alg = build_algebra("sl2");
  EigenlineTracker tr(alg, {1, 1, 1, 1});
  ASSERT_EQ(tr.dim(), 6u);
  ParamPath constant;
  constant.segments.push_back(PathSegment::line(ints({0, 1, 2, 3}), ints({0, 1, 2, 3})));
  EXPECT_TRUE(is_identity(track_eigenlines(constant, tr).permutation));

  auto there = cactus_path(4, {{1, 2}, {0, 3 - 1}});
  EXPECT_THROW(track_eigenlines(there, tr), Error);  // does not close
  auto round = there.then(there.reversed());
  auto r = track_eigenlines(round, tr);
  EXPECT_TRUE(is_identity(r.permutation));
  EXPECT_GE(r.min_join_overlap, 0.99);
  EXPECT_GE(r.min_overlap, 0.9);
}

TEST(Covering, GapFloorAborts) {
  auto alg = build_algebra("sl2");
  EigenlineTracker tr(alg, {1, 1, 1});
  StepControl sc;
  sc.gap_floor = 1e6;
  EXPECT_THROW(track_eigenlines(cactus_path(3, {{0, 1}, {0, 1}}, sc), tr), Error);
}

TEST(Covering, ThreePointLoops) {
  auto alg = build_algebra("sl2");
  auto cat = cactus_catalog(3);
  for (const auto& w : std::vector<std::vector<int>>{{1, 1, 1}, {2, 1, 1}}) {
    auto rs = cactus_loop_suite(3, alg, w, cat);
    for (const auto& r : rs) EXPECT_TRUE(r.ok()) << r.loop.name << ": " << r.error;
    const auto& circle = find(rs, "circle");
    EXPECT_TRUE(is_identity(compose(circle.result.permutation, circle.result.permutation)));
    EXPECT_TRUE(is_identity(find(rs, "back-forth").result.permutation));
    auto twice = cactus_loop_suite(3, alg, w, {concatenate(circle.loop, circle.loop, 3)});
    ASSERT_TRUE(twice[0].ok()) << twice[0].error;
    EXPECT_TRUE(is_identity(twice[0].result.permutation));
  }
}

TEST(Covering, FourPointLoopsComposeAndAreStepRobust) {
  auto alg = build_algebra("sl2");
  auto cat = cactus_catalog(4);
  auto rs = cactus_loop_suite(4, alg, {1, 1, 1, 1}, cat, {}, 2);
  for (const auto& r : rs) {
    ASSERT_TRUE(r.ok()) << r.loop.name << ": " << r.error;
    EXPECT_GE(r.result.min_gap, 1e-8);
  }
  EXPECT_TRUE(is_identity(find(rs, "s12s12").result.permutation));

  std::vector<CactusLoop> pairs;
  std::vector<std::vector<std::size_t>> want;
  for (std::size_t a = 0; a < cat.size(); ++a)
    for (std::size_t b = 0; b < cat.size(); ++b) {
      if ((a + b) % 3 != 0) continue;
      pairs.push_back(concatenate(cat[a], cat[b], 4));
      want.push_back(compose(rs[b].result.permutation, rs[a].result.permutation));
    }
  auto composed = cactus_loop_suite(4, alg, {1, 1, 1, 1}, pairs, {}, 2);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    ASSERT_TRUE(composed[k].ok()) << pairs[k].name << ": " << composed[k].error;
    EXPECT_EQ(composed[k].result.permutation, want[k]) << pairs[k].name;
  }

  // doubled involutive loops
  for (const auto& r : rs) {
    if (!is_identity(compose(r.result.permutation, r.result.permutation))) continue;
    auto d = cactus_loop_suite(4, alg, {1, 1, 1, 1}, {concatenate(r.loop, r.loop, 4)});
    ASSERT_TRUE(d[0].ok()) << d[0].error;
    EXPECT_TRUE(is_identity(d[0].result.permutation)) << r.loop.name;
  }

  // thread count does not change anything
  auto serial = cactus_loop_suite(4, alg, {1, 1, 1, 1}, cat, {}, 1);
  for (std::size_t k = 0; k < cat.size(); ++k) {
    EXPECT_EQ(serial[k].result.permutation, rs[k].result.permutation);
    EXPECT_EQ(serial[k].result.steps, rs[k].result.steps);
    EXPECT_EQ(serial[k].result.path_hash, rs[k].result.path_hash);
  }
}
