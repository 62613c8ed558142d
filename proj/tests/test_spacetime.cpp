#include <cmath>
#include <random>

#include "doctest.h"
#include "smokedet/error.hpp"
#include "smokedet/spacetime.hpp"
#include "smokedet/texture.hpp"
#include "support.hpp"

using namespace smokedet;

namespace {

BlockVolume random_volume(int w, int h, int d, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> dist(lo, hi);
  BlockVolume v(w, h, d);
  for (int t = 0; t < d; ++t) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) v.at(x, y, t) = static_cast<std::uint8_t>(dist(rng));
    }
  }
  return v;
}

GrayImage asym_raster() {
  static const int k[5][5] = {{0, 1, 0, 0, 0}, {2, 7, 3, 0, 0}, {0, 5, 9, 4, 0},
                              {0, 0, 6, 1, 8}, {0, 0, 0, 2, 0}};
  GrayImage img(5, 5);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 5; ++x) img.at(x, y) = static_cast<std::uint8_t>(k[y][x]);
  }
  return img;
}

GrayImage embed(const GrayImage& src, int w, int h, int ox, int oy) {
  GrayImage out(w, h);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) out.at(x + ox, y + oy) = src.at(x, y);
  }
  return out;
}

GrayImage rotate90(const GrayImage& src) {
  GrayImage out(src.height, src.width);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < src.width; ++x) out.at(src.height - 1 - y, x) = src.at(x, y);
  }
  return out;
}

}  // namespace

TEST_CASE("BDA of a small hand volume") {
  BlockVolume v(2, 1, 3);
  v.at(0, 0, 0) = 10;
  v.at(1, 0, 0) = 200;
  v.at(0, 0, 1) = 30;
  v.at(1, 0, 1) = 150;
  v.at(0, 0, 2) = 30;
  v.at(1, 0, 2) = 255;
  const Bda bda = build_bda(v);
  REQUIRE(bda.diffs.size() == 2);
  CHECK(bda.diffs[0].at(0, 0) == 20);
  CHECK(bda.diffs[0].at(1, 0) == 50);
  CHECK(bda.diffs[1].at(0, 0) == 0);
  CHECK(bda.diffs[1].at(1, 0) == 105);
  CHECK_THROWS_AS(build_bda(BlockVolume(4, 4, 1)), ContractError);
}

TEST_CASE("BDA matches a naive oracle and mirrors under time reversal") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const BlockVolume v = random_volume(8, 6, 5, rng);
    const Bda bda = build_bda(v);
    REQUIRE(bda.diffs.size() == 4);
    for (int k = 0; k < 4; ++k) {
      for (int y = 0; y < 6; ++y) {
        for (int x = 0; x < 8; ++x) {
          CHECK(bda.diffs[static_cast<std::size_t>(k)].at(x, y) ==
                std::abs(int(v.at(x, y, k + 1)) - int(v.at(x, y, k))));
        }
      }
    }
    const Bda rev = build_bda(v.reversed());
    for (std::size_t k = 0; k < 4; ++k) CHECK(rev.diffs[k] == bda.diffs[3 - k]);
  }
}

TEST_CASE("from_frames stacks one block over consecutive frames") {
  const BlockGrid g = make_grid(8, 4, 4, 4);
  std::vector<GrayFrame> frames;
  for (int i = 0; i < 3; ++i) {
    GrayFrame f(8, 4, 20 + i);
    for (int y = 0; y < 4; ++y) {
      for (int x = 0; x < 8; ++x) f.at(x, y) = static_cast<std::uint8_t>(100 * i + 10 * y + x);
    }
    frames.push_back(f);
  }
  const BlockVolume v = BlockVolume::from_frames(std::span<const GrayFrame>(frames), g, {0, 1});
  CHECK(v.depth() == 3);
  CHECK(v.last_index() == 22);
  CHECK(v.at(0, 0, 2) == 204);
  CHECK(v.at(3, 3, 1) == 137);
  CHECK(v.xt_plane(3)(3, 1) == 137);
  CHECK(v.yt_plane(3)(3, 1) == 137);
  frames[2].index = 30;
  CHECK_THROWS_AS(BlockVolume::from_frames(std::span<const GrayFrame>(frames), g, {0, 0}),
                  ContractError);
}

TEST_CASE("Hu moments of a lone impulse are zero") {
  GrayImage img(5, 5);
  img.at(2, 2) = 9;
  const HuMoments h = hu_moments(img.view());
  CHECK_FALSE(h.degenerate);
  for (double v : h.values) CHECK(v == 0.0);
  CHECK(hu_moments(GrayImage(4, 4).view()).degenerate);
}

TEST_CASE("Hu moments of an asymmetric raster match the high-precision oracle") {
  // Frozen from tests/oracles/hu_fixture.py (50-digit arithmetic).
  const double want[7] = {4.2417173032407407407e-2, 9.2061172624020255969e-4,
                          3.6609916758896213403e-6, 1.3252636162003084259e-6,
                          2.9011378113205432292e-12, 2.8196431557062123131e-8,
                          -3.2356410787891244279e-13};
  const HuMoments h = hu_moments(asym_raster().view());
  for (int i = 0; i < 7; ++i) {
    CAPTURE(i);
    CHECK(h.values[static_cast<std::size_t>(i)] == doctest::Approx(want[i]).epsilon(1e-10));
  }
}

TEST_CASE("Hu moments are invariant to translation and quarter turns") {
  const GrayImage base = embed(asym_raster(), 16, 16, 1, 2);
  const HuMoments h0 = hu_moments(base.view());
  const HuMoments ht = hu_moments(embed(asym_raster(), 16, 16, 9, 7).view());
  const HuMoments hr = hu_moments(rotate90(base).view());
  for (std::size_t i = 0; i < 7; ++i) {
    CAPTURE(i);
    const double scale = std::max(std::abs(h0.values[i]), 1e-300);
    CHECK(std::abs(ht.values[i] - h0.values[i]) / scale <= 1e-9);
    CHECK(std::abs(hr.values[i] - h0.values[i]) / scale <= 1e-6);
  }
  const std::vector<double> neg = {1, -1, 0, 0};
  CHECK_THROWS_AS(hu_moments(neg, 2, 2), ContractError);
  CHECK_THROWS_AS(hu_moments(neg, 3, 2), ContractError);
}

TEST_CASE("color moments") {
  GrayImage a(4, 1);
  a.at(3, 0) = 12;  // {0, 0, 0, 12}: mean 3, variance 27, third moment 162
  const ColorMoments m = color_moments(a.view());
  CHECK(m.mean == doctest::Approx(3.0));
  CHECK(m.stddev == doctest::Approx(std::sqrt(27.0)));
  CHECK(m.skewness == doctest::Approx(std::cbrt(162.0)));

  GrayImage b(4, 1, 12);
  b.at(3, 0) = 0;  // mirror image: skewness flips sign
  CHECK(color_moments(b.view()).skewness == doctest::Approx(-std::cbrt(162.0)));

  const ColorMoments flat = color_moments(GrayImage(3, 3, 10).view());
  CHECK(flat.mean == 10.0);
  CHECK(flat.stddev == 0.0);
  CHECK(flat.skewness == 0.0);
}

TEST_CASE("color moments match a two-pass oracle") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    const GrayImage img = testing_support::random_gray(9, 7, rng);
    long double s = 0;
    for (auto p : img.pixels) s += p;
    const long double mean = s / img.pixels.size();
    long double m2 = 0, m3 = 0;
    for (auto p : img.pixels) {
      m2 += (p - mean) * (p - mean);
      m3 += (p - mean) * (p - mean) * (p - mean);
    }
    const ColorMoments m = color_moments(img.view());
    CHECK(std::abs(m.mean - static_cast<double>(mean)) <= 1e-12);
    CHECK(std::abs(m.stddev - static_cast<double>(std::sqrt(m2 / img.pixels.size()))) <= 1e-12);
    CHECK(std::abs(m.skewness - static_cast<double>(std::cbrt(m3 / img.pixels.size()))) <= 1e-9);
  }
}

TEST_CASE("feature lengths") {
  CHECK(bifd_cm_length(5) == 12);
  CHECK(spacetime_feature_length(5) == 60);
  CHECK(top_length("uniform-LBP") == 177);
  CHECK(top_length("EOH") == 48);
  CHECK(top_length("LBP") == 768);
  CHECK(top_length("BGC3") == 765);
  CHECK(top_length("RTU") == 135);

  std::mt19937_64 rng(3);
  const BlockVolume v = random_volume(32, 32, 5, rng);
  CHECK(bifd_cm(build_bda(v)).values.size() == 12);
  CHECK(bifd_hu(build_bda(v)).values.size() == 28);
  const FeatureVector f = spacetime_feature(v);
  CHECK(f.values.size() == 60);
  CHECK(f.layout == "FUSED:EOH");
  CHECK(top_descriptor(v, "uniform-LBP").layout == "TOP:uniform-LBP");
}

TEST_CASE("fused feature is BIFD_CM followed by TOP") {
  std::mt19937_64 rng(4);
  const BlockVolume v = random_volume(16, 12, 4, rng);
  const auto cm = bifd_cm(build_bda(v)).values;
  const auto top = top_descriptor(v, "RTU").values;
  std::vector<double> joined = cm;
  joined.insert(joined.end(), top.begin(), top.end());
  CHECK(spacetime_feature(v, "RTU").values == joined);
}

TEST_CASE("TOP of a constant volume puts every family in the all-ones bin") {
  BlockVolume v(8, 8, 5);
  for (int t = 0; t < 5; ++t) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) v.at(x, y, t) = 90;
    }
  }
  const auto top = top_descriptor(v, "uniform-LBP").values;
  const auto ones = static_cast<std::size_t>(patterns::uniform_bin(255));
  for (std::size_t fam = 0; fam < 3; ++fam) {
    for (std::size_t b = 0; b < 59; ++b) CHECK(top[fam * 59 + b] == (b == ones ? 1.0 : 0.0));
  }
  CHECK_THROWS_AS(top_descriptor(BlockVolume(8, 8, 2), "LBP"), ContractError);
}

TEST_CASE("TOP families are each normalized") {
  std::mt19937_64 rng(5);
  const BlockVolume v = random_volume(10, 7, 6, rng);
  for (const char* k : {"LBP", "BGC3", "EOH"}) {
    const auto top = top_descriptor(v, k).values;
    const std::size_t bins = top.size() / 3;
    for (std::size_t fam = 0; fam < 3; ++fam) {
      double s = 0;
      for (std::size_t b = 0; b < bins; ++b) s += top[fam * bins + b];
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("BDA features and comparison-kernel TOP ignore a uniform gray shift") {
  std::mt19937_64 rng(6);
  const BlockVolume v = random_volume(16, 16, 5, rng, 0, 200);
  const BlockVolume s = v.shifted(40);
  CHECK(bifd_cm(build_bda(v)).values == bifd_cm(build_bda(s)).values);
  for (const auto& k : testing_support::comparison_kernels()) {
    CAPTURE(k);
    CHECK(top_descriptor(v, k).values == top_descriptor(s, k).values);
  }
}
