#include "smokedet/candidate.hpp"

#include <algorithm>
#include <cstdlib>

#include "smokedet/error.hpp"

namespace smokedet {

std::size_t BlockMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(),
                                                [](std::uint8_t b) { return b != 0; }));
}

std::vector<BlockRef> BlockMask::blocks() const {
  std::vector<BlockRef> out;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      if ((*this)[BlockRef{r, c}]) out.push_back({r, c});
    }
  }
  return out;
}

bool BlockMask::subset_of(const BlockMask& other) const {
  if (!same_shape(other)) return false;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] && !other.bits_[i]) return false;
  }
  return true;
}

BlockMask operator&(const BlockMask& a, const BlockMask& b) {
  if (!a.same_shape(b)) throw ContractError("block mask shapes differ");
  BlockMask out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] && b[i]);
  return out;
}

void ColorRuleParams::validate() const {
  if (max_channel_spread < 0 || max_channel_spread > 255) {
    throw ConfigError("candidate.color.spread must lie in [0, 255]");
  }
  if (!(0 <= intensity_low && intensity_low < intensity_high && intensity_high <= 255)) {
    throw ConfigError("candidate.color requires 0 <= low < high <= 255");
  }
  if (!(min_fraction >= 0.0 && min_fraction <= 1.0)) {
    throw ConfigError("candidate.color.min_fraction must lie in [0, 1]");
  }
}

bool is_smoke_colored(Rgb px, const ColorRuleParams& params) {
  const int r = px.r, g = px.g, b = px.b;
  const int spread = std::max({std::abs(r - g), std::abs(g - b), std::abs(b - r)});
  if (spread > params.max_channel_spread) return false;
  // (R+G+B)/3 within [low, high], kept in integers.
  const int sum = r + g + b;
  return 3 * params.intensity_low <= sum && sum <= 3 * params.intensity_high;
}

BlockMask moving_blocks(const GrayImage& prev, const GrayImage& cur, const BlockGrid& grid,
                        std::int64_t threshold) {
  if (prev.width != cur.width || prev.height != cur.height) {
    throw ContractError("moving_blocks: frame dimensions differ");
  }
  BlockMask mask(grid);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const GrayView a = block_pixels(prev, grid, {r, c});
      const GrayView b = block_pixels(cur, grid, {r, c});
      std::int64_t sad = 0;
      for (int y = 0; y < a.height(); ++y) {
        for (int x = 0; x < a.width(); ++x) sad += std::abs(int(b(x, y)) - int(a(x, y)));
      }
      mask.set(BlockRef{r, c}, sad > threshold);
    }
  }
  return mask;
}

BlockMask smoke_colored_blocks(const Frame& frame, const BlockGrid& grid,
                               const ColorRuleParams& params) {
  BlockMask mask(grid);
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      const RgbView v = block_pixels(frame, grid, {r, c});
      std::size_t hits = 0;
      for (int y = 0; y < v.height(); ++y) {
        for (int x = 0; x < v.width(); ++x) hits += is_smoke_colored(v(x, y), params);
      }
      const double n = static_cast<double>(v.width()) * v.height();
      mask.set(BlockRef{r, c}, static_cast<double>(hits) >= params.min_fraction * n);
    }
  }
  return mask;
}

BlockMask candidate_blocks(const BlockMask& moving, const BlockMask& colored) {
  return moving & colored;
}

}  // namespace smokedet
