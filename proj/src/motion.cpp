#include "smokedet/motion.hpp"

#include <cstdlib>
#include <limits>
#include <string>

#include "smokedet/error.hpp"

namespace smokedet {

Offset direction_step(int code) {
  static constexpr Offset kSteps[8] = {{1, 0},  {1, -1}, {0, -1}, {-1, -1},
                                       {-1, 0}, {-1, 1}, {0, 1},  {1, 1}};
  if (code < 1 || code > 8) throw ContractError("direction code out of range");
  return kSteps[code - 1];
}

std::uint64_t MotionHistogram::total() const {
  std::uint64_t t = 0;
  for (auto b : bins_) t += b;
  return t;
}

namespace {

std::int64_t window_sad(const GrayImage& prev, const GrayImage& cur, const Rect& r, int dx,
                        int dy) {
  std::int64_t sad = 0;
  for (int y = 0; y < r.height; ++y) {
    const std::uint8_t* a = &prev.pixels[static_cast<std::size_t>(r.y + y) * prev.width + r.x];
    const std::uint8_t* b =
        &cur.pixels[static_cast<std::size_t>(r.y + y + dy) * cur.width + r.x + dx];
    for (int x = 0; x < r.width; ++x) sad += std::abs(int(a[x]) - int(b[x]));
  }
  return sad;
}

}  // namespace

int block_direction(const GrayImage& prev, const GrayImage& cur, BlockRef at,
                    const BlockGrid& grid, int displacement) {
  if (prev.width != cur.width || prev.height != cur.height) {
    throw ContractError("block_direction: frame dimensions differ");
  }
  const Rect r = block_rect(grid, at);
  const std::int64_t still = window_sad(prev, cur, r, 0, 0);
  std::int64_t best = std::numeric_limits<std::int64_t>::max();
  int best_code = kNoMotion;
  for (int code = 1; code <= 8; ++code) {
    const Offset s = direction_step(code);
    const int dx = s.dx * displacement, dy = s.dy * displacement;
    if (r.x + dx < 0 || r.y + dy < 0 || r.x + dx + r.width > cur.width ||
        r.y + dy + r.height > cur.height) {
      continue;
    }
    const std::int64_t sad = window_sad(prev, cur, r, dx, dy);
    if (sad < best) {
      best = sad;
      best_code = code;
    }
  }
  return best < still ? best_code : kNoMotion;
}

DirectionField block_directions(const GrayImage& prev, const GrayImage& cur,
                                const BlockGrid& grid, int displacement) {
  DirectionField out(static_cast<std::size_t>(grid.block_count()));
  for (int r = 0; r < grid.rows; ++r) {
    for (int c = 0; c < grid.cols; ++c) {
      out[static_cast<std::size_t>(r) * grid.cols + c] =
          static_cast<std::uint8_t>(block_direction(prev, cur, {r, c}, grid, displacement));
    }
  }
  return out;
}

AmoState::AmoState(const BlockGrid& grid, int window)
    : grid_(grid), window_(window), hists_(static_cast<std::size_t>(grid.block_count())) {
  if (window < 1) throw ConfigError("motion.w_t must be at least 1");
}

void AmoState::push(const DirectionField& codes) {
  if (codes.size() != hists_.size()) {
    throw ContractError("direction field has " + std::to_string(codes.size()) +
                        " entries, grid has " + std::to_string(hists_.size()));
  }
  for (std::size_t i = 0; i < codes.size(); ++i) {
    if (codes[i] > 8) throw ContractError("direction code out of range");
    if (codes[i] != kNoMotion) ++hists_[i][codes[i]];
  }
  fields_.push_back(codes);
  if (static_cast<int>(fields_.size()) > window_) {
    const DirectionField& oldest = fields_.front();
    for (std::size_t i = 0; i < oldest.size(); ++i) {
      if (oldest[i] != kNoMotion) --hists_[i][oldest[i]];
    }
    fields_.pop_front();
  }
}

const MotionHistogram& AmoState::histogram(BlockRef at) const {
  block_rect(grid_, at);  // range check
  return hists_[static_cast<std::size_t>(at.row) * grid_.cols + at.col];
}

AmoState accumulate(AmoState state, const DirectionField& codes) {
  state.push(codes);
  return state;
}

std::optional<double> umr(const MotionHistogram& h) {
  const std::uint64_t total = h.total();
  if (total == 0) return std::nullopt;
  const std::uint64_t up = std::uint64_t{h[kDir45]} + h[kDir90] + h[kDir135];
  return static_cast<double>(up) / static_cast<double>(total);
}

BlockMask filter_by_umr(const BlockMask& mask, const AmoState& state, double t_u) {
  const BlockGrid& g = state.grid();
  if (mask.rows() != g.rows || mask.cols() != g.cols) {
    throw ContractError("filter_by_umr: mask and motion state shapes differ");
  }
  BlockMask out(g);
  for (int r = 0; r < g.rows; ++r) {
    for (int c = 0; c < g.cols; ++c) {
      if (!mask[BlockRef{r, c}]) continue;
      const auto ratio = umr(state.histogram({r, c}));
      out.set(BlockRef{r, c}, ratio && *ratio >= t_u);
    }
  }
  return out;
}

}  // namespace smokedet
