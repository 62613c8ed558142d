#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smokedet/image.hpp"
#include "smokedet/ingest.hpp"

namespace smokedet {

// A block followed through `depth` consecutive frames, ending at frame
// `last_index`. Voxels are stored slice by slice (t-major, then row-major).
class BlockVolume {
 public:
  BlockVolume() = default;
  BlockVolume(int width, int height, int depth);

  /// Stacks block `at` from each of `frames` (oldest first).
  static BlockVolume from_frames(std::span<const GrayFrame> frames, const BlockGrid& grid,
                                 BlockRef at);
  static BlockVolume from_frames(std::span<const GrayFrame* const> frames, const BlockGrid& grid,
                                 BlockRef at);

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }
  BlockRef block() const { return block_; }
  std::int64_t last_index() const { return last_index_; }

  std::uint8_t& at(int x, int y, int t) { return voxels_[offset(x, y, t)]; }
  std::uint8_t at(int x, int y, int t) const { return voxels_[offset(x, y, t)]; }

  // Plane views without copying: XY at time t, XT at row y, YT at column x.
  // XT/YT planes have time as their vertical axis.
  GrayView xy_plane(int t) const;
  GrayView xt_plane(int y) const;
  GrayView yt_plane(int x) const;

  BlockVolume reversed() const;
  BlockVolume shifted(int delta) const;  // saturating add to every voxel

 private:
  std::size_t offset(int x, int y, int t) const {
    return (static_cast<std::size_t>(t) * height_ + y) * width_ + x;
  }

  int width_ = 0;
  int height_ = 0;
  int depth_ = 0;
  BlockRef block_{};
  std::int64_t last_index_ = 0;
  std::vector<std::uint8_t> voxels_;
};

// Block difference array: |slice_{k+1} - slice_k| for k = 0 .. depth-2.
struct Bda {
  std::vector<GrayImage> diffs;
};

Bda build_bda(const BlockVolume& volume);

struct HuMoments {
  std::array<double, 7> values{};
  bool degenerate = false;  // zero total mass; values are all zero
};

HuMoments hu_moments(std::span<const double> field, int width, int height);
HuMoments hu_moments(const GrayView& raster);

struct ColorMoments {
  double mean = 0.0;
  double stddev = 0.0;   // population
  double skewness = 0.0; // signed cube root of the third central moment
};

ColorMoments color_moments(const GrayView& raster);

struct FeatureVector {
  std::vector<double> values;
  std::string layout;  // "BIFD_CM", "BIFD_HU", "TOP:<kernel>" or "FUSED:<kernel>"
};

FeatureVector bifd_cm(const Bda& bda);
FeatureVector bifd_hu(const Bda& bda);

/// Plane descriptor over the three orthogonal plane families; one histogram
/// per family, each normalized on its own, concatenated XY ++ XT ++ YT.
FeatureVector top_descriptor(const BlockVolume& volume, std::string_view plane_kernel);

inline constexpr std::string_view kDefaultTopKernel = "EOH";

/// bifd_cm(build_bda(volume)) ++ top_descriptor(volume, top_kernel).
FeatureVector spacetime_feature(const BlockVolume& volume,
                                std::string_view top_kernel = kDefaultTopKernel);

std::size_t bifd_cm_length(int depth);
std::size_t top_length(std::string_view plane_kernel);
std::size_t spacetime_feature_length(int depth, std::string_view top_kernel = kDefaultTopKernel);

}  // namespace smokedet
