#include "smokedet/ingest.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "smokedet/error.hpp"

namespace smokedet {

BlockGrid make_grid(int image_width, int image_height, int block_width, int block_height) {
  if (image_width < 1 || image_height < 1 || block_width < 1 || block_height < 1) {
    throw ConfigError("grid dimensions must be positive");
  }
  if (block_width > image_width || block_height > image_height) {
    throw ConfigError("block " + std::to_string(block_width) + "x" +
                      std::to_string(block_height) + " does not fit a " +
                      std::to_string(image_width) + "x" + std::to_string(image_height) +
                      " frame");
  }
  return {block_width, block_height, image_height / block_height, image_width / block_width};
}

Rect block_rect(const BlockGrid& grid, BlockRef at) {
  if (at.row < 0 || at.row >= grid.rows || at.col < 0 || at.col >= grid.cols) {
    throw IndexError("block (" + std::to_string(at.row) + "," + std::to_string(at.col) +
                     ") outside " + std::to_string(grid.rows) + "x" +
                     std::to_string(grid.cols) + " grid");
  }
  return {at.col * grid.block_width, at.row * grid.block_height, grid.block_width,
          grid.block_height};
}

GrayView block_pixels(const GrayImage& image, const BlockGrid& grid, BlockRef at) {
  const Rect r = block_rect(grid, at);
  if (r.x + r.width > image.width || r.y + r.height > image.height) {
    throw ContractError("grid does not match image dimensions");
  }
  return image.view().sub(r.x, r.y, r.width, r.height);
}

RgbView block_pixels(const Frame& frame, const BlockGrid& grid, BlockRef at) {
  const Rect r = block_rect(grid, at);
  if (r.x + r.width > frame.width || r.y + r.height > frame.height) {
    throw ContractError("grid does not match frame dimensions");
  }
  return {frame.pixels.data() + static_cast<std::ptrdiff_t>(r.y) * frame.width + r.x, r.width,
          r.height, frame.width};
}

std::uint8_t luminance(Rgb px) {
  // Integer form of round(0.299 R + 0.587 G + 0.114 B); max is exactly 255.
  const unsigned sum = 299u * px.r + 587u * px.g + 114u * px.b;
  return static_cast<std::uint8_t>((sum + 500u) / 1000u);
}

GrayFrame to_grayscale(const Frame& frame) {
  GrayFrame out(frame.width, frame.height, frame.index);
  std::transform(frame.pixels.begin(), frame.pixels.end(), out.pixels.begin(), luminance);
  return out;
}

SourceFormat parse_source_format(std::string_view tag) {
  if (tag.empty() || tag == "auto") return SourceFormat::Auto;
  if (tag == "pnm" || tag == "ppm" || tag == "pgm" || tag == "dir") {
    return SourceFormat::PnmDirectory;
  }
  if (tag == "y4m") return SourceFormat::Y4m;
  throw ConfigError("unknown source format tag: " + std::string(tag));
}

std::optional<Frame> FrameSource::next() {
  std::optional<Frame> frame = read_next();
  if (!frame) return std::nullopt;
  if (next_index_ == 0) {
    width_ = frame->width;
    height_ = frame->height;
  } else if (frame->width != width_ || frame->height != height_) {
    throw FormatError("frame " + std::to_string(next_index_) + " is " +
                      std::to_string(frame->width) + "x" + std::to_string(frame->height) +
                      ", expected " + std::to_string(width_) + "x" + std::to_string(height_));
  }
  frame->index = next_index_++;
  return frame;
}

std::vector<Frame> load_sequence(const std::filesystem::path& path, SourceFormat format) {
  auto source = FrameSource::open(path, format);
  std::vector<Frame> frames;
  while (auto f = source->next()) frames.push_back(std::move(*f));
  return frames;
}

void write_ppm_sequence(const std::filesystem::path& dir, const std::vector<Frame>& frames) {
  std::filesystem::create_directories(dir);
  char name[32];
  for (std::size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof name, "f%04zu.ppm", i);
    write_ppm(dir / name, frames[i]);
  }
}

}  // namespace smokedet
