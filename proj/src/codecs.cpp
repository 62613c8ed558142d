// PPM/PGM and YUV4MPEG2 readers and writers.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "smokedet/error.hpp"
#include "smokedet/ingest.hpp"

namespace smokedet {
namespace {

namespace fs = std::filesystem;

std::uint8_t clamp_round(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

int read_header_int(std::istream& in, const fs::path& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) {
    throw FormatError("malformed PNM header in " + path.string());
  }
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1'000'000) throw FormatError("PNM dimension too large in " + path.string());
    c = in.get();
  }
  // Exactly one whitespace byte separates the last header field from the raster.
  if (c == EOF || !std::isspace(c)) {
    throw FormatError("malformed PNM header in " + path.string());
  }
  return static_cast<int>(value);
}

struct PnmRaster {
  bool color = false;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;
};

PnmRaster read_pnm_raster(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5')) {
    throw FormatError("unsupported magic bytes in " + path.string() + " (expected P5 or P6)");
  }
  PnmRaster r;
  r.color = magic[1] == '6';
  r.width = read_header_int(in, path);
  r.height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (r.width < 1 || r.height < 1) throw FormatError("empty image in " + path.string());
  if (maxval != 255) {
    throw FormatError("maxval " + std::to_string(maxval) + " in " + path.string() +
                      " (only 255 is supported)");
  }
  r.samples.resize(static_cast<std::size_t>(r.width) * r.height * (r.color ? 3 : 1));
  in.read(reinterpret_cast<char*>(r.samples.data()),
          static_cast<std::streamsize>(r.samples.size()));
  if (in.gcount() != static_cast<std::streamsize>(r.samples.size())) {
    throw IoError("truncated raster in " + path.string());
  }
  return r;
}

class PnmDirectorySource final : public FrameSource {
 public:
  explicit PnmDirectorySource(const fs::path& dir) {
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
      if (!entry.is_regular_file()) continue;
      const auto ext = entry.path().extension().string();
      if (ext == ".ppm" || ext == ".pgm" || ext == ".PPM" || ext == ".PGM") {
        files_.push_back(entry.path());
      }
    }
    if (ec) throw IoError("cannot list " + dir.string() + ": " + ec.message());
    std::sort(files_.begin(), files_.end());
  }

 protected:
  std::optional<Frame> read_next() override {
    if (pos_ >= files_.size()) return std::nullopt;
    return read_pnm(files_[pos_++]);
  }

 private:
  std::vector<fs::path> files_;
  std::size_t pos_ = 0;
};

std::vector<std::string> split_spaces(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int parse_dimension(const std::string& text, const fs::path& path) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw FormatError("bad Y4M dimension '" + text + "' in " + path.string());
  }
  return v;
}

class Y4mSource final : public FrameSource {
 public:
  explicit Y4mSource(const fs::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
    std::string header;
    if (!std::getline(in_, header) || header.rfind("YUV4MPEG2", 0) != 0) {
      throw FormatError("unsupported magic bytes in " + path.string() +
                        " (expected YUV4MPEG2)");
    }
    for (const auto& tok : split_spaces(header.substr(9))) {
      const char tag = tok[0];
      const std::string val = tok.substr(1);
      if (tag == 'W') {
        width_ = parse_dimension(val, path);
      } else if (tag == 'H') {
        height_ = parse_dimension(val, path);
      } else if (tag == 'C') {
        if (val.rfind("420", 0) == 0) {
          chroma_ = ChromaLayout::C420;
        } else if (val == "444") {
          chroma_ = ChromaLayout::C444;
        } else {
          throw FormatError("unsupported Y4M colorspace C" + val + " in " + path.string());
        }
      } else if (tag == 'I' && val != "p" && val != "?") {
        throw FormatError("interlaced Y4M is not supported: " + path.string());
      }
    }
    if (width_ < 1 || height_ < 1) {
      throw FormatError("Y4M header without valid W/H in " + path.string());
    }
    chroma_w_ = chroma_ == ChromaLayout::C420 ? (width_ + 1) / 2 : width_;
    chroma_h_ = chroma_ == ChromaLayout::C420 ? (height_ + 1) / 2 : height_;
  }

 protected:
  std::optional<Frame> read_next() override {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    if (line.rfind("FRAME", 0) != 0) {
      throw FormatError("expected FRAME marker at frame " + std::to_string(count_) + " in " +
                        path_.string());
    }
    const std::size_t luma = static_cast<std::size_t>(width_) * height_;
    const std::size_t chroma = static_cast<std::size_t>(chroma_w_) * chroma_h_;
    buf_.resize(luma + 2 * chroma);
    in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (in_.gcount() != static_cast<std::streamsize>(buf_.size())) {
      throw IoError("truncated frame " + std::to_string(count_) + " in " + path_.string());
    }
    const std::uint8_t* ys = buf_.data();
    const std::uint8_t* us = ys + luma;
    const std::uint8_t* vs = us + chroma;
    const int sub = chroma_ == ChromaLayout::C420 ? 2 : 1;
    Frame f(width_, height_);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        const std::size_t ci = static_cast<std::size_t>(y / sub) * chroma_w_ + x / sub;
        const double Y = ys[static_cast<std::size_t>(y) * width_ + x];
        const double cb = us[ci] - 128.0;
        const double cr = vs[ci] - 128.0;
        f.at(x, y) = {clamp_round(Y + 1.402 * cr), clamp_round(Y - 0.344136 * cb - 0.714136 * cr),
                      clamp_round(Y + 1.772 * cb)};
      }
    }
    ++count_;
    return f;
  }

 private:
  fs::path path_;
  std::ifstream in_;
  int width_ = 0;
  int height_ = 0;
  int chroma_w_ = 0;
  int chroma_h_ = 0;
  ChromaLayout chroma_ = ChromaLayout::C420;
  std::int64_t count_ = 0;
  std::vector<std::uint8_t> buf_;
};

}  // namespace

Frame read_pnm(const fs::path& path) {
  PnmRaster r = read_pnm_raster(path);
  Frame f(r.width, r.height);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    if (r.color) {
      f.pixels[i] = {r.samples[3 * i], r.samples[3 * i + 1], r.samples[3 * i + 2]};
    } else {
      f.pixels[i] = {r.samples[i], r.samples[i], r.samples[i]};
    }
  }
  return f;
}

GrayImage read_pnm_gray(const fs::path& path) {
  PnmRaster r = read_pnm_raster(path);
  if (!r.color) {
    GrayImage g(r.width, r.height);
    g.pixels = std::move(r.samples);
    return g;
  }
  Frame f(r.width, r.height);
  for (std::size_t i = 0; i < f.pixels.size(); ++i) {
    f.pixels[i] = {r.samples[3 * i], r.samples[3 * i + 1], r.samples[3 * i + 2]};
  }
  return to_grayscale(f);
}

void write_ppm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P6\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size() * sizeof(Rgb)));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::unique_ptr<FrameSource> FrameSource::open(const fs::path& path, SourceFormat format) {
  if (format == SourceFormat::Auto) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      format = SourceFormat::PnmDirectory;
    } else if (fs::exists(path, ec)) {
      format = SourceFormat::Y4m;
    } else {
      throw IoError("no such input: " + path.string());
    }
  }
  if (format == SourceFormat::PnmDirectory) return std::make_unique<PnmDirectorySource>(path);
  return std::make_unique<Y4mSource>(path);
}

struct Y4mWriter::Impl {
  std::ofstream out;
  fs::path path;
  int width;
  int height;
  ChromaLayout chroma;
};

Y4mWriter::Y4mWriter(const fs::path& path, int width, int height, ChromaLayout chroma, int fps)
    : impl_(std::make_unique<Impl>(Impl{std::ofstream(path, std::ios::binary), path, width,
                                        height, chroma})) {
  if (!impl_->out) throw IoError("cannot write " + path.string());
  impl_->out << "YUV4MPEG2 W" << width << " H" << height << " F" << fps << ":1 Ip A1:1 C"
             << (chroma == ChromaLayout::C420 ? "420jpeg" : "444") << "\n";
}

Y4mWriter::~Y4mWriter() = default;

void Y4mWriter::write(const Frame& frame) {
  if (frame.width != impl_->width || frame.height != impl_->height) {
    throw ContractError("Y4M frame dimensions differ from stream header");
  }
  const int w = frame.width;
  const int h = frame.height;
  const int sub = impl_->chroma == ChromaLayout::C420 ? 2 : 1;
  const int cw = (w + sub - 1) / sub;
  const int ch = (h + sub - 1) / sub;
  std::vector<std::uint8_t> ys(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> us(static_cast<std::size_t>(cw) * ch);
  std::vector<std::uint8_t> vs(us.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) ys[static_cast<std::size_t>(y) * w + x] = luminance(frame.at(x, y));
  }
  for (int cy = 0; cy < ch; ++cy) {
    for (int cx = 0; cx < cw; ++cx) {
      double cb = 0.0, cr = 0.0;
      int n = 0;
      for (int dy = 0; dy < sub; ++dy) {
        for (int dx = 0; dx < sub; ++dx) {
          const int x = cx * sub + dx, y = cy * sub + dy;
          if (x >= w || y >= h) continue;
          const Rgb p = frame.at(x, y);
          cb += 128.0 - 0.168736 * p.r - 0.331264 * p.g + 0.5 * p.b;
          cr += 128.0 + 0.5 * p.r - 0.418688 * p.g - 0.081312 * p.b;
          ++n;
        }
      }
      us[static_cast<std::size_t>(cy) * cw + cx] = clamp_round(cb / n);
      vs[static_cast<std::size_t>(cy) * cw + cx] = clamp_round(cr / n);
    }
  }
  auto& out = impl_->out;
  out << "FRAME\n";
  out.write(reinterpret_cast<const char*>(ys.data()), static_cast<std::streamsize>(ys.size()));
  out.write(reinterpret_cast<const char*>(us.data()), static_cast<std::streamsize>(us.size()));
  out.write(reinterpret_cast<const char*>(vs.data()), static_cast<std::streamsize>(vs.size()));
  if (!out) throw IoError("write failed for " + impl_->path.string());
}

}  // namespace smokedet
