#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "smokedet/image.hpp"

namespace smokedet {

// Partition of a frame into non-overlapping blocks. Pixels to the right of
// cols*block_width or below rows*block_height belong to no block.
struct BlockGrid {
  int block_width = 0;
  int block_height = 0;
  int rows = 0;
  int cols = 0;

  int block_count() const { return rows * cols; }
  friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

struct BlockRef {
  int row = 0;
  int col = 0;

  friend bool operator==(const BlockRef&, const BlockRef&) = default;
};

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Throws ConfigError when a block does not fit into the image.
BlockGrid make_grid(int image_width, int image_height, int block_width, int block_height);

/// Pixel rectangle of a block; throws IndexError when `at` is outside the grid.
Rect block_rect(const BlockGrid& grid, BlockRef at);

GrayView block_pixels(const GrayImage& image, const BlockGrid& grid, BlockRef at);
RgbView block_pixels(const Frame& frame, const BlockGrid& grid, BlockRef at);

// BT.601 luma, rounded half up.
std::uint8_t luminance(Rgb px);
GrayFrame to_grayscale(const Frame& frame);

// ---- still images ----------------------------------------------------------

// Binary PPM (P6) or PGM (P5) with maxval 255. PGM samples are replicated
// into all three channels.
Frame read_pnm(const std::filesystem::path& path);
GrayImage read_pnm_gray(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Frame& frame);
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

// ---- sequences -------------------------------------------------------------

enum class SourceFormat { Auto, PnmDirectory, Y4m };

SourceFormat parse_source_format(std::string_view tag);

enum class ChromaLayout { C420, C444 };

// Pull-based frame reader. Frames come out with indices 0, 1, 2, ... and all
// share the dimensions of the first frame; a mismatch raises FormatError
// naming the offending frame index.
class FrameSource {
 public:
  virtual ~FrameSource() = default;

  static std::unique_ptr<FrameSource> open(const std::filesystem::path& path,
                                           SourceFormat format = SourceFormat::Auto);

  std::optional<Frame> next();

 protected:
  virtual std::optional<Frame> read_next() = 0;

 private:
  std::int64_t next_index_ = 0;
  int width_ = 0;
  int height_ = 0;
};

// Serves frames already in memory, e.g. from the synthetic scene generator.
class MemoryFrameSource final : public FrameSource {
 public:
  explicit MemoryFrameSource(std::vector<Frame> frames) : frames_(std::move(frames)) {}

 protected:
  std::optional<Frame> read_next() override {
    if (pos_ >= frames_.size()) return std::nullopt;
    return frames_[pos_++];
  }

 private:
  std::vector<Frame> frames_;
  std::size_t pos_ = 0;
};

std::vector<Frame> load_sequence(const std::filesystem::path& path,
                                 SourceFormat format = SourceFormat::Auto);

class Y4mWriter {
 public:
  Y4mWriter(const std::filesystem::path& path, int width, int height,
            ChromaLayout chroma = ChromaLayout::C444, int fps = 25);
  ~Y4mWriter();
  Y4mWriter(const Y4mWriter&) = delete;
  Y4mWriter& operator=(const Y4mWriter&) = delete;

  void write(const Frame& frame);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Writes frames as <dir>/f0000.ppm, f0001.ppm, ...
void write_ppm_sequence(const std::filesystem::path& dir, const std::vector<Frame>& frames);

}  // namespace smokedet
