#pragma once

#include <cstdint>
#include <vector>

#include "smokedet/image.hpp"
#include "smokedet/ingest.hpp"

namespace smokedet {

// One flag per grid block, row-major.
class BlockMask {
 public:
  BlockMask() = default;
  BlockMask(int rows, int cols, bool value = false)
      : rows_(rows), cols_(cols), bits_(static_cast<std::size_t>(rows) * cols, value) {}
  explicit BlockMask(const BlockGrid& grid, bool value = false)
      : BlockMask(grid.rows, grid.cols, value) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return bits_.size(); }

  bool operator[](BlockRef at) const { return bits_[index(at)] != 0; }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(BlockRef at, bool value = true) { bits_[index(at)] = value; }
  void set(std::size_t i, bool value = true) { bits_[i] = value; }

  std::size_t count() const;
  std::vector<BlockRef> blocks() const;
  bool same_shape(const BlockMask& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  // True when every set block of this mask is also set in `other`.
  bool subset_of(const BlockMask& other) const;

  friend bool operator==(const BlockMask&, const BlockMask&) = default;

 private:
  std::size_t index(BlockRef at) const {
    return static_cast<std::size_t>(at.row) * cols_ + at.col;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Blockwise AND; throws ContractError on shape mismatch.
BlockMask operator&(const BlockMask& a, const BlockMask& b);

// Grayish-pixel rule: low spread between channels and mid-range intensity.
struct ColorRuleParams {
  int max_channel_spread = 20;
  int intensity_low = 80;
  int intensity_high = 220;
  double min_fraction = 0.5;

  void validate() const;
};

bool is_smoke_colored(Rgb px, const ColorRuleParams& params);

/// Sum over each block of |cur - prev|; a block moves when that sum exceeds
/// `threshold`.
BlockMask moving_blocks(const GrayImage& prev, const GrayImage& cur, const BlockGrid& grid,
                        std::int64_t threshold);

BlockMask smoke_colored_blocks(const Frame& frame, const BlockGrid& grid,
                               const ColorRuleParams& params);

BlockMask candidate_blocks(const BlockMask& moving, const BlockMask& colored);

}  // namespace smokedet
