#include "smokedet/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "smokedet/error.hpp"
#include "smokedet/texture.hpp"

namespace smokedet {

BlockVolume::BlockVolume(int width, int height, int depth)
    : width_(width), height_(height), depth_(depth),
      voxels_(static_cast<std::size_t>(width) * height * depth, 0) {
  if (width < 1 || height < 1 || depth < 1) throw ContractError("empty block volume");
}

BlockVolume BlockVolume::from_frames(std::span<const GrayFrame> frames, const BlockGrid& grid,
                                     BlockRef at) {
  std::vector<const GrayFrame*> ptrs;
  for (const auto& f : frames) ptrs.push_back(&f);
  return from_frames(std::span<const GrayFrame* const>(ptrs), grid, at);
}

BlockVolume BlockVolume::from_frames(std::span<const GrayFrame* const> frames,
                                     const BlockGrid& grid, BlockRef at) {
  if (frames.empty()) throw ContractError("block volume needs at least one frame");
  BlockVolume v(grid.block_width, grid.block_height, static_cast<int>(frames.size()));
  v.block_ = at;
  v.last_index_ = frames.back()->index;
  for (int t = 0; t < v.depth_; ++t) {
    if (t > 0 && frames[t]->index != frames[t - 1]->index + 1) {
      throw ContractError("block volume frames must be consecutive");
    }
    const GrayView src = block_pixels(*frames[t], grid, at);
    for (int y = 0; y < v.height_; ++y) {
      for (int x = 0; x < v.width_; ++x) v.at(x, y, t) = src(x, y);
    }
  }
  return v;
}

GrayView BlockVolume::xy_plane(int t) const {
  return {&voxels_[offset(0, 0, t)], width_, height_, width_};
}

GrayView BlockVolume::xt_plane(int y) const {
  return {&voxels_[offset(0, y, 0)], width_, depth_,
          static_cast<std::ptrdiff_t>(width_) * height_};
}

GrayView BlockVolume::yt_plane(int x) const {
  return {&voxels_[offset(x, 0, 0)], height_, depth_,
          static_cast<std::ptrdiff_t>(width_) * height_, width_};
}

BlockVolume BlockVolume::reversed() const {
  BlockVolume r = *this;
  for (int t = 0; t < depth_; ++t) {
    std::copy_n(&voxels_[offset(0, 0, t)], static_cast<std::size_t>(width_) * height_,
                &r.voxels_[offset(0, 0, depth_ - 1 - t)]);
  }
  return r;
}

BlockVolume BlockVolume::shifted(int delta) const {
  BlockVolume r = *this;
  for (auto& v : r.voxels_) v = static_cast<std::uint8_t>(std::clamp(int(v) + delta, 0, 255));
  return r;
}

Bda build_bda(const BlockVolume& volume) {
  if (volume.depth() < 2) throw ContractError("build_bda needs a volume of depth >= 2");
  Bda bda;
  for (int k = 0; k + 1 < volume.depth(); ++k) {
    GrayImage d(volume.width(), volume.height());
    for (int y = 0; y < volume.height(); ++y) {
      for (int x = 0; x < volume.width(); ++x) {
        d.at(x, y) = static_cast<std::uint8_t>(
            std::abs(int(volume.at(x, y, k + 1)) - int(volume.at(x, y, k))));
      }
    }
    bda.diffs.push_back(std::move(d));
  }
  return bda;
}

HuMoments hu_moments(std::span<const double> field, int width, int height) {
  if (width < 1 || height < 1 || field.size() != static_cast<std::size_t>(width) * height) {
    throw ContractError("hu_moments: field size does not match dimensions");
  }
  HuMoments out;
  double m00 = 0.0, m10 = 0.0, m01 = 0.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double f = field[static_cast<std::size_t>(y) * width + x];
      if (f < 0.0) throw ContractError("hu_moments: field must be non-negative");
      m00 += f;
      m10 += x * f;
      m01 += y * f;
    }
  }
  if (m00 <= 0.0) {
    out.degenerate = true;
    return out;
  }
  const double xc = m10 / m00, yc = m01 / m00;
  double mu20 = 0, mu02 = 0, mu11 = 0, mu30 = 0, mu03 = 0, mu21 = 0, mu12 = 0;
  for (int y = 0; y < height; ++y) {
    const double dy = y - yc;
    for (int x = 0; x < width; ++x) {
      const double f = field[static_cast<std::size_t>(y) * width + x];
      if (f == 0.0) continue;
      const double dx = x - xc;
      mu20 += dx * dx * f;
      mu02 += dy * dy * f;
      mu11 += dx * dy * f;
      mu30 += dx * dx * dx * f;
      mu03 += dy * dy * dy * f;
      mu21 += dx * dx * dy * f;
      mu12 += dx * dy * dy * f;
    }
  }
  // eta_pq = mu_pq / m00^(1 + (p+q)/2)
  const double s2 = m00 * m00;
  const double s3 = std::pow(m00, 2.5);
  const double n20 = mu20 / s2, n02 = mu02 / s2, n11 = mu11 / s2;
  const double n30 = mu30 / s3, n03 = mu03 / s3, n21 = mu21 / s3, n12 = mu12 / s3;

  const double a = n30 + n12;   // shared sub-terms
  const double b = n21 + n03;
  const double c = n30 - 3 * n12;
  const double d = 3 * n21 - n03;
  auto& h = out.values;
  h[0] = n20 + n02;
  h[1] = (n20 - n02) * (n20 - n02) + 4 * n11 * n11;
  h[2] = c * c + d * d;
  h[3] = a * a + b * b;
  h[4] = c * a * (a * a - 3 * b * b) + d * b * (3 * a * a - b * b);
  h[5] = (n20 - n02) * (a * a - b * b) + 4 * n11 * a * b;
  h[6] = d * a * (a * a - 3 * b * b) - c * b * (3 * a * a - b * b);
  return out;
}

HuMoments hu_moments(const GrayView& raster) {
  std::vector<double> f(raster.size());
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      f[static_cast<std::size_t>(y) * raster.width() + x] = raster(x, y);
    }
  }
  return hu_moments(f, raster.width(), raster.height());
}

ColorMoments color_moments(const GrayView& raster) {
  if (raster.size() == 0) throw ContractError("color_moments: empty raster");
  const double n = static_cast<double>(raster.size());
  double sum = 0.0;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) sum += raster(x, y);
  }
  ColorMoments m;
  m.mean = sum / n;
  double m2 = 0.0, m3 = 0.0;
  for (int y = 0; y < raster.height(); ++y) {
    for (int x = 0; x < raster.width(); ++x) {
      const double d = raster(x, y) - m.mean;
      m2 += d * d;
      m3 += d * d * d;
    }
  }
  m.stddev = std::sqrt(m2 / n);
  m.skewness = std::cbrt(m3 / n);
  return m;
}

FeatureVector bifd_cm(const Bda& bda) {
  FeatureVector fv{{}, "BIFD_CM"};
  fv.values.reserve(3 * bda.diffs.size());
  for (const auto& d : bda.diffs) {
    const ColorMoments m = color_moments(d.view());
    fv.values.insert(fv.values.end(), {m.mean, m.stddev, m.skewness});
  }
  return fv;
}

FeatureVector bifd_hu(const Bda& bda) {
  FeatureVector fv{{}, "BIFD_HU"};
  fv.values.reserve(7 * bda.diffs.size());
  for (const auto& d : bda.diffs) {
    const HuMoments h = hu_moments(d.view());
    fv.values.insert(fv.values.end(), h.values.begin(), h.values.end());
  }
  return fv;
}

FeatureVector top_descriptor(const BlockVolume& volume, std::string_view plane_kernel) {
  const DescriptorKernel& kernel = find_kernel(plane_kernel);
  if (volume.depth() < 3 || volume.width() < 3 || volume.height() < 3) {
    throw ContractError("top_descriptor needs a volume of at least 3x3x3");
  }
  HistogramAccumulator xy(kernel), xt(kernel), yt(kernel);
  for (int t = 0; t < volume.depth(); ++t) xy.add(volume.xy_plane(t));
  for (int y = 0; y < volume.height(); ++y) xt.add(volume.xt_plane(y));
  for (int x = 0; x < volume.width(); ++x) yt.add(volume.yt_plane(x));

  FeatureVector fv{{}, "TOP:" + std::string(kernel.name)};
  fv.values.reserve(3 * static_cast<std::size_t>(kernel.bin_count));
  for (const auto* acc : {&xy, &xt, &yt}) {
    const Histogram h = acc->finish();
    fv.values.insert(fv.values.end(), h.bins.begin(), h.bins.end());
  }
  return fv;
}

FeatureVector spacetime_feature(const BlockVolume& volume, std::string_view top_kernel) {
  FeatureVector fv = bifd_cm(build_bda(volume));
  const FeatureVector top = top_descriptor(volume, top_kernel);
  fv.values.insert(fv.values.end(), top.values.begin(), top.values.end());
  fv.layout = "FUSED:" + std::string(top_kernel);
  return fv;
}

std::size_t bifd_cm_length(int depth) { return 3 * static_cast<std::size_t>(depth - 1); }

std::size_t top_length(std::string_view plane_kernel) {
  return 3 * static_cast<std::size_t>(find_kernel(plane_kernel).bin_count);
}

std::size_t spacetime_feature_length(int depth, std::string_view top_kernel) {
  return bifd_cm_length(depth) + top_length(top_kernel);
}

}  // namespace smokedet
