#include <random>

#include "doctest.h"
#include "smokedet/error.hpp"
#include "smokedet/motion.hpp"
#include "support.hpp"

using namespace smokedet;

namespace {

// cur(x, y) = prev(x - dx, y - dy): content moves by (dx, dy). Pixels pulled
// from outside keep fresh random values.
GrayImage translate(const GrayImage& prev, int dx, int dy, std::mt19937_64& rng) {
  GrayImage cur = testing_support::random_gray(prev.width, prev.height, rng);
  for (int y = 0; y < prev.height; ++y) {
    for (int x = 0; x < prev.width; ++x) {
      const int sx = x - dx, sy = y - dy;
      if (sx >= 0 && sy >= 0 && sx < prev.width && sy < prev.height) cur.at(x, y) = prev.at(sx, sy);
    }
  }
  return cur;
}

GrayImage flip_vertical(const GrayImage& img) {
  GrayImage out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) out.at(x, img.height - 1 - y) = img.at(x, y);
  }
  return out;
}

AmoState push_codes(const BlockGrid& g, int window, std::initializer_list<int> codes) {
  AmoState s(g, window);
  for (int c : codes) s.push(DirectionField(static_cast<std::size_t>(g.block_count()), static_cast<std::uint8_t>(c)));
  return s;
}

}  // namespace

TEST_CASE("direction steps follow the counter-clockwise code order") {
  CHECK(direction_step(1).dx == 1);
  CHECK(direction_step(1).dy == 0);
  CHECK(direction_step(3).dx == 0);
  CHECK(direction_step(3).dy == -1);  // up
  CHECK(direction_step(5).dx == -1);
  CHECK(direction_step(7).dy == 1);   // down
  CHECK(direction_step(2).dx == 1);
  CHECK(direction_step(2).dy == -1);
}

TEST_CASE("static scene gives no motion") {
  std::mt19937_64 rng(1);
  const GrayImage a = testing_support::random_gray(96, 96, rng);
  const BlockGrid g = make_grid(96, 96, 32, 32);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(block_direction(a, a, {r, c}, g) == kNoMotion);
  }
}

TEST_CASE("synthetic translations map to the expected code") {
  std::mt19937_64 rng(2);
  const BlockGrid g = make_grid(96, 96, 32, 32);
  for (int code = 1; code <= 8; ++code) {
    const GrayImage a = testing_support::random_gray(96, 96, rng);
    const Offset s = direction_step(code);
    const GrayImage b = translate(a, 3 * s.dx, 3 * s.dy, rng);
    CAPTURE(code);
    CHECK(block_direction(a, b, {1, 1}, g) == code);
  }
}

TEST_CASE("out-of-frame shifts are skipped") {
  std::mt19937_64 rng(3);
  const GrayImage a = testing_support::random_gray(64, 32, rng);
  const BlockGrid g = make_grid(64, 32, 32, 32);
  // Content moves up; the block touches the top edge so the upward window is
  // out of frame and cannot be chosen.
  const GrayImage b = translate(a, 0, -3, rng);
  const int code = block_direction(a, b, {0, 0}, g);
  CHECK(code != kDir90);
  CHECK(code != kDir45);
  CHECK(code != kDir135);
  // A block as large as the frame has no valid shift at all.
  const BlockGrid whole = make_grid(64, 32, 64, 32);
  CHECK(block_direction(a, b, {0, 0}, whole) == kNoMotion);
}

TEST_CASE("vertical flip swaps 3/7, 2/8 and 4/6") {
  std::mt19937_64 rng(4);
  const BlockGrid g = make_grid(96, 96, 32, 32);
  const int pairs[][2] = {{3, 7}, {2, 8}, {4, 6}, {7, 3}, {1, 1}, {5, 5}};
  for (const auto& p : pairs) {
    const GrayImage a = testing_support::random_gray(96, 96, rng);
    const Offset s = direction_step(p[0]);
    const GrayImage b = translate(a, 3 * s.dx, 3 * s.dy, rng);
    REQUIRE(block_direction(a, b, {1, 1}, g) == p[0]);
    CHECK(block_direction(flip_vertical(a), flip_vertical(b), {1, 1}, g) == p[1]);
  }
}

TEST_CASE("AMO window counts and evicts") {
  const BlockGrid g = make_grid(32, 32, 32, 32);
  AmoState s = push_codes(g, 4, {3, 3, 2, 1});
  MotionHistogram want;
  want[1] = 1;
  want[2] = 1;
  want[3] = 2;
  CHECK(s.histogram({0, 0}) == want);
  s = accumulate(s, DirectionField{4});
  want[3] = 1;
  want[4] = 1;
  CHECK(s.histogram({0, 0}) == want);
  CHECK(s.depth() == 4);
  CHECK(push_codes(g, 4, {0, 0, 0}).histogram({0, 0}).total() == 0);
}

TEST_CASE("AMO sliding window conserves its total") {
  const BlockGrid g = make_grid(64, 32, 32, 32);
  const int w = 6;
  AmoState s(g, w);
  for (int i = 0; i < w; ++i) s.push(DirectionField{5, 5});
  CHECK(s.histogram({0, 1})[5] == static_cast<std::uint32_t>(w));
  s.push(DirectionField{2, 2});
  CHECK(s.histogram({0, 1}).total() == static_cast<std::uint64_t>(w));
  CHECK(s.histogram({0, 1})[2] == 1);
  CHECK_THROWS_AS(s.push(DirectionField{1}), ContractError);
}

TEST_CASE("umr values") {
  MotionHistogram h;
  CHECK_FALSE(umr(h).has_value());
  h[2] = h[3] = h[4] = 1;
  CHECK(*umr(h) == 1.0);
  for (int c = 1; c <= 8; ++c) h[c] = 1;
  CHECK(*umr(h) == 0.375);

  // Scale invariance and range over random histograms.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    MotionHistogram a, b;
    for (int c = 1; c <= 8; ++c) {
      a[c] = static_cast<std::uint32_t>(rng() % 7);
      b[c] = a[c] * 3;
    }
    if (a.total() == 0) continue;
    CHECK(*umr(a) >= 0.0);
    CHECK(*umr(a) <= 1.0);
    CHECK(*umr(a) == doctest::Approx(*umr(b)).epsilon(1e-15));
  }
}

TEST_CASE("filter_by_umr keeps UMR >= T_U only") {
  const BlockGrid g = make_grid(96, 32, 32, 32);
  AmoState s(g, 20);
  // Block 0: 12 up / 20 = 0.6; block 1: 11 up / 20 = 0.55; block 2: no votes.
  for (int i = 0; i < 20; ++i) {
    s.push(DirectionField{static_cast<std::uint8_t>(i < 12 ? 3 : 7),
                          static_cast<std::uint8_t>(i < 11 ? 2 : 6), 0});
  }
  const BlockMask kept = filter_by_umr(BlockMask(g, true), s, 0.55);
  CHECK(kept[BlockRef{0, 0}]);
  CHECK(kept[BlockRef{0, 1}]);
  CHECK_FALSE(kept[BlockRef{0, 2}]);
  CHECK_FALSE(filter_by_umr(BlockMask(g, true), s, 0.6)[BlockRef{0, 1}]);
  // Non-candidates stay off.
  CHECK(filter_by_umr(BlockMask(g, false), s, 0.0).count() == 0);
}
