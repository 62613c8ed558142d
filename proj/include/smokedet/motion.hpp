#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "smokedet/candidate.hpp"
#include "smokedet/ingest.hpp"

namespace smokedet {

// Direction codes. 0 means "no motion"; 1..8 are 0°, 45°, ..., 315° measured
// counter-clockwise from the +x axis with "up" being decreasing row index.
// Codes 2, 3 and 4 are the upward directions.
enum DirectionCode : std::uint8_t {
  kNoMotion = 0,
  kDir0 = 1,
  kDir45 = 2,
  kDir90 = 3,
  kDir135 = 4,
  kDir180 = 5,
  kDir225 = 6,
  kDir270 = 7,
  kDir315 = 8,
};

struct Offset {
  int dx = 0;
  int dy = 0;
};

/// Unit step (in pixels, image coordinates) for a direction code 1..8.
Offset direction_step(int code);

class MotionHistogram {
 public:
  std::uint32_t operator[](int code) const { return bins_[code - 1]; }
  std::uint32_t& operator[](int code) { return bins_[code - 1]; }
  std::uint64_t total() const;

  friend bool operator==(const MotionHistogram&, const MotionHistogram&) = default;

 private:
  std::array<std::uint32_t, 8> bins_{};
};

/// Dominant displacement of a block between two frames. Each of the eight
/// candidate motions v (displacement pixels along a direction) is scored by
/// the SAD between the block in `prev` and the window at block + v in `cur`.
/// The lowest-scoring code wins if it is strictly below the zero-motion SAD;
/// ties go to the lower code. Windows leaving the frame are skipped.
int block_direction(const GrayImage& prev, const GrayImage& cur, BlockRef at,
                    const BlockGrid& grid, int displacement = 3);

// Per-block direction codes for one frame pair, row-major over the grid.
using DirectionField = std::vector<std::uint8_t>;

DirectionField block_directions(const GrayImage& prev, const GrayImage& cur,
                                const BlockGrid& grid, int displacement = 3);

// Sliding window of the last `window` direction fields with per-block
// histograms kept in sync.
class AmoState {
 public:
  AmoState(const BlockGrid& grid, int window);

  void push(const DirectionField& codes);

  int window() const { return window_; }
  int depth() const { return static_cast<int>(fields_.size()); }
  const BlockGrid& grid() const { return grid_; }
  const MotionHistogram& histogram(BlockRef at) const;

 private:
  BlockGrid grid_;
  int window_;
  std::deque<DirectionField> fields_;
  std::vector<MotionHistogram> hists_;
};

/// Functional form of AmoState::push.
AmoState accumulate(AmoState state, const DirectionField& codes);

/// Fraction of votes in codes 2..4; nullopt when the histogram is empty.
std::optional<double> umr(const MotionHistogram& h);

/// Keeps blocks whose UMR is defined and not below `t_u`.
BlockMask filter_by_umr(const BlockMask& mask, const AmoState& state, double t_u = 0.55);

}  // namespace smokedet
