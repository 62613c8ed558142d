#include "smokedet/shi.hpp"

#include <algorithm>

#include "smokedet/error.hpp"

namespace smokedet {

ShiMap::ShiMap(int rows, int cols, int t_max, int threshold)
    : rows_(rows), cols_(cols), t_max_(t_max), threshold_(threshold),
      counters_(static_cast<std::size_t>(rows) * cols, 0) {
  if (rows < 1 || cols < 1) throw ConfigError("SHI map needs a non-empty grid");
  if (!(0 < threshold && threshold <= t_max)) {
    throw ConfigError("SHI requires 0 < threshold <= t_max");
  }
}

int ShiMap::counter(BlockRef at) const {
  if (at.row < 0 || at.row >= rows_ || at.col < 0 || at.col >= cols_) {
    throw IndexError("SHI block out of range");
  }
  return counters_[static_cast<std::size_t>(at.row) * cols_ + at.col];
}

BlockMask ShiMap::decide_and_update(const BlockMask& detections) {
  if (detections.rows() != rows_ || detections.cols() != cols_) {
    throw ContractError("SHI map and detection mask shapes differ");
  }
  BlockMask final_mask(rows_, cols_);
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    final_mask.set(i, detections[i] && counters_[i] >= threshold_);
  }
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    counters_[i] = detections[i] ? t_max_ : std::max(counters_[i] - 1, 0);
  }
  return final_mask;
}

GrayImage ShiMap::to_image() const {
  GrayImage img(cols_, rows_);
  for (std::size_t i = 0; i < counters_.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>((counters_[i] * 255 + t_max_ / 2) / t_max_);
  }
  return img;
}

void write_shi_pgm(const std::filesystem::path& path, const ShiMap& shi) {
  write_pgm(path, shi.to_image());
}

}  // namespace smokedet
