#include "smokedet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "smokedet/error.hpp"

namespace smokedet {

SceneKind parse_scene_kind(std::string_view name) {
  if (name == "static") return SceneKind::Static;
  if (name == "plume") return SceneKind::Plume;
  if (name == "red-object") return SceneKind::RedObject;
  if (name == "gray-object") return SceneKind::GrayObject;
  if (name == "flicker") return SceneKind::Flicker;
  throw ConfigError("unknown scene kind '" + std::string(name) + "'");
}

namespace {

std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

std::uint8_t clamp_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

double ValueNoise::lattice(std::int64_t ix, std::int64_t iy) const {
  const std::uint64_t h =
      mix(seed_ ^ mix(static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL +
                      static_cast<std::uint64_t>(iy)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double ValueNoise::operator()(double x, double y) const {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double sx = smooth(x - fx);
  const double sy = smooth(y - fy);
  const double a = lattice(ix, iy) + sx * (lattice(ix + 1, iy) - lattice(ix, iy));
  const double b = lattice(ix, iy + 1) + sx * (lattice(ix + 1, iy + 1) - lattice(ix, iy + 1));
  return a + sy * (b - a);
}

double ValueNoise::fbm(double x, double y) const {
  return (4.0 * (*this)(x, y) + 2.0 * (*this)(2.0 * x + 17.3, 2.0 * y + 5.1) +
          (*this)(4.0 * x + 3.7, 4.0 * y + 29.9)) /
         7.0;
}

namespace {

Frame make_background(const SceneParams& p) {
  const ValueNoise coarse(mix(p.seed * 3 + 1));
  const ValueNoise fine(mix(p.seed * 3 + 2));
  Frame bg;
  bg.width = p.width;
  bg.height = p.height;
  bg.pixels.resize(static_cast<std::size_t>(p.width) * p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      const double n = coarse.fbm(x / 24.0, y / 24.0);
      const double m = fine(x / 5.0, y / 5.0);
      bg.at(x, y) = {clamp_u8(55 + 35 * n + 12 * m), clamp_u8(92 + 50 * n + 12 * m),
                     clamp_u8(50 + 30 * n + 8 * m)};
    }
  }
  return bg;
}

Rgb blend(Rgb under, double gray, double alpha) {
  auto ch = [&](std::uint8_t c) { return clamp_u8((1.0 - alpha) * c + alpha * gray); };
  return {ch(under.r), ch(under.g), ch(under.b)};
}

struct Placement {
  double x = 0;
  double y = 0;
};

class SceneRenderer {
 public:
  explicit SceneRenderer(const SceneParams& p)
      : p_(p), bg_(make_background(p)), turb_(mix(p.seed * 7 + 3)), shade_(mix(p.seed * 7 + 4)) {
    std::mt19937_64 rng(mix(p.seed * 7 + 5));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Plume source low in the frame, object start chosen so it crosses the view.
    origin_.x = p.width * (0.3 + 0.4 * u(rng));
    origin_.y = p.height - 24 - 8 * u(rng);
    if (p.kind == SceneKind::RedObject || p.kind == SceneKind::GrayObject) {
      origin_.x = p.velocity.dx > 0   ? -40.0
                  : p.velocity.dx < 0 ? p.width + 40.0
                                      : p.width * (0.2 + 0.6 * u(rng));
      origin_.y = p.velocity.dy > 0   ? -30.0
                  : p.velocity.dy < 0 ? p.height + 30.0
                                      : p.height * (0.3 + 0.4 * u(rng));
    }
    if (p.kind == SceneKind::Flicker) {
      origin_.x = p.width * (0.2 + 0.5 * u(rng));
      origin_.y = p.height * (0.2 + 0.5 * u(rng));
    }
    phase_ = 2.0 * std::numbers::pi * u(rng);
  }

  Frame render(int t) const {
    Frame f = bg_;
    f.index = t;
    if (t >= p_.onset) {
      switch (p_.kind) {
        case SceneKind::Static: break;
        case SceneKind::Plume: draw_plume(f, t - p_.onset); break;
        case SceneKind::RedObject: draw_disc(f, t - p_.onset); break;
        case SceneKind::GrayObject: draw_box(f, t - p_.onset); break;
        case SceneKind::Flicker: draw_flicker(f, t - p_.onset); break;
      }
    }
    add_noise(f, t);
    return f;
  }

 private:
  void draw_plume(Frame& f, int age) const {
    const double v = p_.rise_speed;
    const double front = v * (age + 1);
    const double scroll = v * (p_.onset + age);
    for (int y = 0; y < p_.height; ++y) {
      const double hgt = origin_.y - y;
      if (hgt < 0 || hgt > front) continue;
      const double half = 18.0 + 0.5 * hgt;
      const double sway = 5.0 * std::sin(0.05 * age + 0.03 * hgt + phase_);
      const double tip = std::clamp((front - hgt) / 12.0, 0.0, 1.0);
      const double base = std::clamp(hgt / 6.0, 0.0, 1.0);
      for (int x = 0; x < p_.width; ++x) {
        const double r = (x - origin_.x - sway) / half;
        const double env = 1.0 - r * r;
        if (env <= 0.0) continue;
        // Texture coordinates move with the smoke: content at (x, y) at this
        // frame was at (x, y + v) one frame earlier.
        const double ty = (y + scroll) / 8.0;
        const double turb = turb_.fbm(x / 8.0, ty);
        const double alpha = 0.97 * std::pow(env, 0.25) * tip * base * (0.72 + 0.28 * turb);
        const double gray = 172.0 + 140.0 * (shade_.fbm(x / 5.0, (y + scroll) / 5.0) - 0.5);
        f.at(x, y) = blend(f.at(x, y), gray, alpha);
      }
    }
  }

  Placement object_at(int age) const {
    return {origin_.x + p_.velocity.dx * age, origin_.y + p_.velocity.dy * age};
  }

  void draw_disc(Frame& f, int age) const {
    const Placement c = object_at(age);
    const double radius = 30.0;
    for (int y = 0; y < p_.height; ++y) {
      for (int x = 0; x < p_.width; ++x) {
        const double dx = x - c.x;
        const double dy = y - c.y;
        if (dx * dx + dy * dy > radius * radius) continue;
        // Texture is attached to the object.
        const double n = turb_(dx / 6.0 + 50.0, dy / 6.0 + 50.0);
        f.at(x, y) = {clamp_u8(170 + 60 * n), clamp_u8(25 + 20 * n), clamp_u8(30 + 20 * n)};
      }
    }
  }

  void draw_box(Frame& f, int age) const {
    const Placement c = object_at(age);
    const int w = 72;
    const int h = 52;
    for (int y = 0; y < p_.height; ++y) {
      for (int x = 0; x < p_.width; ++x) {
        const double lx = x - c.x + w / 2.0;
        const double ly = y - c.y + h / 2.0;
        if (lx < 0 || ly < 0 || lx >= w || ly >= h) continue;
        const bool dark = (static_cast<int>(lx / 9) + static_cast<int>(ly / 9)) % 2 == 0;
        const double g = (dark ? 115.0 : 185.0) + 10.0 * turb_(lx / 3.0 + 9.0, ly / 3.0 + 9.0);
        const std::uint8_t v = clamp_u8(g);
        f.at(x, y) = {v, v, v};
      }
    }
  }

  void draw_flicker(Frame& f, int age) const {
    const int w = 80;
    const int h = 64;
    const double gain = 1.0 + 0.22 * std::sin(2.0 * std::numbers::pi * age / 6.0 + phase_);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const int px = static_cast<int>(origin_.x) + x;
        const int py = static_cast<int>(origin_.y) + y;
        if (px < 0 || py < 0 || px >= p_.width || py >= p_.height) continue;
        const double g = (120.0 + 60.0 * shade_.fbm(x / 10.0, y / 10.0)) * gain;
        const std::uint8_t v = clamp_u8(g);
        f.at(px, py) = {v, v, v};
      }
    }
  }

  void add_noise(Frame& f, int t) const {
    if (p_.noise <= 0) return;
    std::mt19937_64 rng(mix(p_.seed * 11 + static_cast<std::uint64_t>(t)));
    std::uniform_int_distribution<int> d(-p_.noise, p_.noise);
    for (auto& px : f.pixels) {
      const int n = d(rng);
      px = {clamp_u8(px.r + n), clamp_u8(px.g + n), clamp_u8(px.b + n)};
    }
  }

  SceneParams p_;
  Frame bg_;
  ValueNoise turb_;
  ValueNoise shade_;
  Placement origin_;
  double phase_ = 0.0;
};

}  // namespace

std::vector<Frame> generate_scene(const SceneParams& params) {
  if (params.width < 1 || params.height < 1 || params.frames < 0) {
    throw ConfigError("scene needs positive dimensions and a non-negative frame count");
  }
  const SceneRenderer renderer(params);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(params.frames));
  for (int t = 0; t < params.frames; ++t) frames.push_back(renderer.render(t));
  return frames;
}

}  // namespace smokedet
