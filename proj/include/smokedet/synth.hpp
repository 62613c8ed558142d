#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "smokedet/image.hpp"
#include "smokedet/motion.hpp"

namespace smokedet {

// Procedural test scenes over a static, greenish textured background with
// mild per-frame sensor noise.
enum class SceneKind {
  Static,      // background only
  Plume,       // translucent gray plume rising from a point source
  RedObject,   // opaque red textured disc moving with `velocity`
  GrayObject,  // opaque gray checkered box moving with `velocity`
  Flicker,     // gray patch whose brightness oscillates in place
};

SceneKind parse_scene_kind(std::string_view name);

struct SceneParams {
  SceneKind kind = SceneKind::Static;
  int width = 320;
  int height = 240;
  int frames = 100;
  int onset = 10;           // first frame showing the plume, object or flicker
  std::uint64_t seed = 1;   // drives background, placement and noise
  Offset velocity{0, 3};    // object scenes, pixels per frame
  int rise_speed = 3;       // plume, pixels per frame
  int noise = 1;            // sensor noise amplitude in gray levels
};

std::vector<Frame> generate_scene(const SceneParams& params);

// Lattice value noise in [0, 1), smoothly interpolated; `fbm` sums three
// octaves.
class ValueNoise {
 public:
  explicit ValueNoise(std::uint64_t seed) : seed_(seed) {}
  double operator()(double x, double y) const;
  double fbm(double x, double y) const;

 private:
  double lattice(std::int64_t ix, std::int64_t iy) const;
  std::uint64_t seed_;
};

}  // namespace smokedet
