#pragma once

#include <filesystem>
#include <vector>

#include "smokedet/candidate.hpp"

namespace smokedet {

// Smoke history image: one recency counter per block. A detection sets the
// counter to t_max; every frame without one decrements it, stopping at 0.
// A detection becomes a final alarm only when the counter, as it stood
// before this frame's update, has reached `threshold`.
class ShiMap {
 public:
  ShiMap(int rows, int cols, int t_max = 15, int threshold = 10);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int t_max() const { return t_max_; }
  int threshold() const { return threshold_; }
  int counter(BlockRef at) const;
  const std::vector<int>& counters() const { return counters_; }

  /// Decides final alarms from the current counters, then updates them.
  BlockMask decide_and_update(const BlockMask& detections);

  /// Counters scaled to [0, 255] as a rows x cols image.
  GrayImage to_image() const;

 private:
  int rows_;
  int cols_;
  int t_max_;
  int threshold_;
  std::vector<int> counters_;
};

void write_shi_pgm(const std::filesystem::path& path, const ShiMap& shi);

}  // namespace smokedet
