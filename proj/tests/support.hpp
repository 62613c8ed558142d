#pragma once
// Small helpers shared by the test executables.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "smokedet/image.hpp"
#include "smokedet/texture.hpp"

namespace testing_support {

using smokedet::Frame;
using smokedet::GrayImage;
using smokedet::Rgb;

inline GrayImage random_gray(int w, int h, std::mt19937_64& rng, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> d(lo, hi);
  GrayImage img(w, h);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(d(rng));
  return img;
}

inline Frame random_frame(int w, int h, std::mt19937_64& rng, std::int64_t index = 0) {
  std::uniform_int_distribution<int> d(0, 255);
  Frame f(w, h, index);
  for (auto& p : f.pixels) {
    p = {static_cast<std::uint8_t>(d(rng)), static_cast<std::uint8_t>(d(rng)),
         static_cast<std::uint8_t>(d(rng))};
  }
  return f;
}

inline Frame gray_to_frame(const GrayImage& g, std::int64_t index = 0) {
  Frame f(g.width, g.height, index);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) f.pixels[i] = {g.pixels[i], g.pixels[i], g.pixels[i]};
  return f;
}

// Neighbour offsets in the library's documented order: clockwise from east.
inline constexpr int kDx[8] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kDy[8] = {0, 1, 1, 1, 0, -1, -1, -1};

// Per-pixel LBP histogram written from scratch (no library pattern code).
inline std::vector<double> naive_lbp_histogram(const GrayImage& img) {
  std::vector<double> h(256, 0.0);
  double d = 0;
  for (int y = 1; y + 1 < img.height; ++y) {
    for (int x = 1; x + 1 < img.width; ++x) {
      int code = 0;
      for (int p = 0; p < 8; ++p) {
        if (img.at(x + kDx[p], y + kDy[p]) >= img.at(x, y)) code |= 1 << p;
      }
      h[static_cast<std::size_t>(code)] += 1;
      d += 1;
    }
  }
  for (auto& v : h) v /= d;
  return h;
}

// Comparison-only kernels: their codes depend on sign patterns alone.
inline const std::vector<std::string>& comparison_kernels() {
  static const std::vector<std::string> k = {"LBP", "uniform-LBP", "RT",   "RTU",  "MTS",
                                             "CS-LBP", "CBP",      "BGC1", "BGC2", "BGC3"};
  return k;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("smokedet-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
