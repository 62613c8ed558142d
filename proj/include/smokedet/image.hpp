#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace smokedet {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Read-only strided view over 8-bit samples. Both strides are in elements, so
// the same type addresses an image row, a sub-block, or a slice taken across
// time from a space-time volume.
class GrayView {
 public:
  GrayView() = default;
  GrayView(const std::uint8_t* data, int width, int height, std::ptrdiff_t row_stride,
           std::ptrdiff_t col_stride = 1)
      : data_(data), width_(width), height_(height), row_stride_(row_stride),
        col_stride_(col_stride) {}

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return static_cast<std::size_t>(width_) * height_; }

  std::uint8_t operator()(int x, int y) const {
    return data_[y * row_stride_ + x * col_stride_];
  }

  GrayView sub(int x, int y, int w, int h) const {
    return {data_ + y * row_stride_ + x * col_stride_, w, h, row_stride_, col_stride_};
  }

 private:
  const std::uint8_t* data_ = nullptr;
  int width_ = 0;
  int height_ = 0;
  std::ptrdiff_t row_stride_ = 0;
  std::ptrdiff_t col_stride_ = 1;
};

class RgbView {
 public:
  RgbView() = default;
  RgbView(const Rgb* data, int width, int height, std::ptrdiff_t row_stride)
      : data_(data), width_(width), height_(height), row_stride_(row_stride) {}

  int width() const { return width_; }
  int height() const { return height_; }
  const Rgb& operator()(int x, int y) const { return data_[y * row_stride_ + x]; }

 private:
  const Rgb* data_ = nullptr;
  int width_ = 0;
  int height_ = 0;
  std::ptrdiff_t row_stride_ = 0;
};

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  GrayImage() = default;
  GrayImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  GrayView view() const { return {pixels.data(), width, height, width}; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// Luminance raster of frame `index` of a sequence.
struct GrayFrame : GrayImage {
  std::int64_t index = 0;

  GrayFrame() = default;
  GrayFrame(int w, int h, std::int64_t idx, std::uint8_t fill = 0)
      : GrayImage(w, h, fill), index(idx) {}
};

// Decoded RGB frame, 8 bits per channel, row-major.
struct Frame {
  int width = 0;
  int height = 0;
  std::int64_t index = 0;
  std::vector<Rgb> pixels;

  Frame() = default;
  Frame(int w, int h, std::int64_t idx = 0, Rgb fill = {})
      : width(w), height(h), index(idx), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  RgbView view() const { return {pixels.data(), width, height, width}; }
};

}  // namespace smokedet
