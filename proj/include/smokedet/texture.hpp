#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "smokedet/image.hpp"

namespace smokedet {

// 3x3 neighbourhood. Neighbours are enumerated clockwise (as seen on screen,
// y growing downwards) starting from the east pixel:
//
//   n[5] n[6] n[7]        NW N NE
//   n[4]  c   n[0]   =>   W  c  E
//   n[3] n[2] n[1]        SW S SE
struct Neighborhood {
  std::uint8_t center = 0;
  std::array<std::uint8_t, 8> n{};
};

Neighborhood neighborhood_at(const GrayView& img, int x, int y);

// Image-level parameters some descriptors need before coding pixels.
struct GlobalParams {
  double mean = 0.0;
};

enum class KernelId {
  GLD,
  RT,
  RTU,
  LBP,
  UniformLBP,
  MTS,
  CSLBP,
  CBP,
  BGC1,
  BGC2,
  BGC3,
  EOH,
};

struct DescriptorKernel {
  std::string_view name;
  KernelId id;
  int bin_count;
  bool needs_global_pass = false;
  // False for EOH, which weights orientation bins by gradient magnitude
  // instead of counting integer pattern codes.
  bool is_pattern = true;

  /// Pattern code in [0, bin_count). Throws ContractError for EOH.
  int code(const Neighborhood& nb, const GlobalParams& global = {}) const;
};

/// Every implemented descriptor.
std::span<const DescriptorKernel> kernel_registry();

/// Looks a kernel up by name. Names from the wider equivalent-pattern family
/// that are not implemented (and unknown names) raise UnsupportedKernel.
const DescriptorKernel& find_kernel(std::string_view name);

// Individual pattern functions, exposed for tests and for custom kernels.
namespace patterns {

inline constexpr int kCsLbpThreshold = 3;

int lbp(const Neighborhood& nb);
int circular_transitions(int pattern);
bool is_uniform(int pattern);
// Bin of an 8-bit pattern in the 59-bin uniform mapping (58 = non-uniform).
int uniform_bin(int pattern);
int rank_transform(const Neighborhood& nb);
int reduced_texture_unit(const Neighborhood& nb);
int modified_texture_spectrum(const Neighborhood& nb);
int cs_lbp(const Neighborhood& nb, int threshold = kCsLbpThreshold);
int centralized_binary_pattern(const Neighborhood& nb, int threshold = kCsLbpThreshold);
// Sum of 1[g_k >= g_{k+1}] * 2^k around the closed path through `order`
// (8 neighbour indices). Never 0: a closed path cannot strictly ascend.
int bgc_loop_raw(const Neighborhood& nb, const std::array<int, 8>& order);
int bgc1(const Neighborhood& nb);
int bgc2(const Neighborhood& nb);
int bgc3(const Neighborhood& nb);
int gray_level_difference(const Neighborhood& nb);

inline constexpr std::array<int, 8> kBgc1Order = {0, 1, 2, 3, 4, 5, 6, 7};
inline constexpr std::array<int, 8> kBgc3Order = {0, 3, 6, 1, 4, 7, 2, 5};

}  // namespace patterns

inline constexpr int kEohBins = 16;

// Normalized descriptor histogram. `normalizer` is the number of coded
// positions D; for EOH the bins are magnitude weights normalized to sum 1.
struct Histogram {
  std::vector<double> bins;
  std::size_t normalizer = 0;

  double sum() const;
};

// Accumulates one descriptor over any number of images (or planes), then
// normalizes once. Every image must be at least 3x3; border pixels are not
// coded.
class HistogramAccumulator {
 public:
  explicit HistogramAccumulator(const DescriptorKernel& kernel);

  void add(const GrayView& img);
  Histogram finish() const;
  std::size_t positions() const { return positions_; }

 private:
  const DescriptorKernel* kernel_;
  std::vector<double> weights_;
  std::size_t positions_ = 0;
};

Histogram hep_histogram(const GrayView& img, const DescriptorKernel& kernel);
inline Histogram hep_histogram(const GrayImage& img, const DescriptorKernel& kernel) {
  return hep_histogram(img.view(), kernel);
}

}  // namespace smokedet
