#include "smokedet/texture.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "smokedet/error.hpp"

namespace smokedet {

Neighborhood neighborhood_at(const GrayView& img, int x, int y) {
  Neighborhood nb;
  nb.center = img(x, y);
  nb.n = {img(x + 1, y),     img(x + 1, y + 1), img(x, y + 1),     img(x - 1, y + 1),
          img(x - 1, y),     img(x - 1, y - 1), img(x, y - 1),     img(x + 1, y - 1)};
  return nb;
}

namespace patterns {

int lbp(const Neighborhood& nb) {
  int code = 0;
  for (int p = 0; p < 8; ++p) code |= (nb.n[p] >= nb.center) << p;
  return code;
}

int circular_transitions(int pattern) {
  const int rotated = ((pattern >> 1) | ((pattern & 1) << 7)) & 0xFF;
  return std::popcount(static_cast<unsigned>(pattern ^ rotated));
}

bool is_uniform(int pattern) { return circular_transitions(pattern) <= 2; }

namespace {

constexpr std::array<std::uint8_t, 256> make_uniform_table() {
  std::array<std::uint8_t, 256> table{};
  int next = 0;
  for (int p = 0; p < 256; ++p) {
    const int rotated = ((p >> 1) | ((p & 1) << 7)) & 0xFF;
    const int transitions = std::popcount(static_cast<unsigned>(p ^ rotated));
    table[p] = static_cast<std::uint8_t>(transitions <= 2 ? next++ : 58);
  }
  return table;
}

constexpr auto kUniformTable = make_uniform_table();

}  // namespace

int uniform_bin(int pattern) { return kUniformTable[pattern & 0xFF]; }

int rank_transform(const Neighborhood& nb) {
  int less = 0;
  for (auto g : nb.n) less += g < nb.center;
  return less;
}

int reduced_texture_unit(const Neighborhood& nb) {
  int less = 0, equal = 0;
  for (auto g : nb.n) {
    less += g < nb.center;
    equal += g == nb.center;
  }
  // Pairs (less, equal) with less + equal <= 8, ordered by less then equal.
  return 9 * less - less * (less - 1) / 2 + equal;
}

int modified_texture_spectrum(const Neighborhood& nb) {
  // W, NW, N, NE: the half of the ring already visited in raster order.
  int code = 0;
  for (int k = 0; k < 4; ++k) code |= (nb.n[4 + k] >= nb.center) << k;
  return code;
}

int cs_lbp(const Neighborhood& nb, int threshold) {
  int code = 0;
  for (int p = 0; p < 4; ++p) code |= (int(nb.n[p]) - int(nb.n[p + 4]) >= threshold) << p;
  return code;
}

int centralized_binary_pattern(const Neighborhood& nb, int threshold) {
  int sum = nb.center;
  for (auto g : nb.n) sum += g;
  // g_c >= mean of the nine pixels, compared exactly as 9 g_c >= sum.
  return cs_lbp(nb, threshold) | ((9 * nb.center >= sum) << 4);
}

int bgc_loop_raw(const Neighborhood& nb, const std::array<int, 8>& order) {
  int code = 0;
  for (int k = 0; k < 8; ++k) code |= (nb.n[order[k]] >= nb.n[order[(k + 1) % 8]]) << k;
  return code;
}

int bgc1(const Neighborhood& nb) { return bgc_loop_raw(nb, kBgc1Order) - 1; }

int bgc2(const Neighborhood& nb) {
  int a = 0, b = 0;
  for (int k = 0; k < 4; ++k) {
    a |= (nb.n[2 * k] >= nb.n[(2 * k + 2) % 8]) << k;
    b |= (nb.n[2 * k + 1] >= nb.n[(2 * k + 3) % 8]) << k;
  }
  return 15 * (a - 1) + (b - 1);
}

int bgc3(const Neighborhood& nb) { return bgc_loop_raw(nb, kBgc3Order) - 1; }

int gray_level_difference(const Neighborhood& nb) {
  return std::abs(int(nb.center) - int(nb.n[0]));
}

}  // namespace patterns

int DescriptorKernel::code(const Neighborhood& nb, const GlobalParams&) const {
  using namespace patterns;
  switch (id) {
    case KernelId::GLD: return gray_level_difference(nb);
    case KernelId::RT: return rank_transform(nb);
    case KernelId::RTU: return reduced_texture_unit(nb);
    case KernelId::LBP: return lbp(nb);
    case KernelId::UniformLBP: return uniform_bin(lbp(nb));
    case KernelId::MTS: return modified_texture_spectrum(nb);
    case KernelId::CSLBP: return cs_lbp(nb);
    case KernelId::CBP: return centralized_binary_pattern(nb);
    case KernelId::BGC1: return bgc1(nb);
    case KernelId::BGC2: return bgc2(nb);
    case KernelId::BGC3: return bgc3(nb);
    case KernelId::EOH: break;
  }
  throw ContractError(std::string(name) + " has no integer pattern code");
}

namespace {

constexpr DescriptorKernel kKernels[] = {
    {"GLD", KernelId::GLD, 256},
    {"RT", KernelId::RT, 9},
    {"RTU", KernelId::RTU, 45},
    {"LBP", KernelId::LBP, 256},
    {"uniform-LBP", KernelId::UniformLBP, 59},
    {"MTS", KernelId::MTS, 16},
    {"CS-LBP", KernelId::CSLBP, 16},
    {"CBP", KernelId::CBP, 32},
    {"BGC1", KernelId::BGC1, 255},
    {"BGC2", KernelId::BGC2, 225},
    {"BGC3", KernelId::BGC3, 255},
    {"EOH", KernelId::EOH, kEohBins, false, false},
};

template <class F>
void for_each_interior(const GrayView& img, F&& f) {
  for (int y = 1; y + 1 < img.height(); ++y) {
    for (int x = 1; x + 1 < img.width(); ++x) f(neighborhood_at(img, x, y));
  }
}

template <class CodeFn>
void count_codes(const GrayView& img, std::vector<double>& w, CodeFn code) {
  for_each_interior(img, [&](const Neighborhood& nb) { w[code(nb)] += 1.0; });
}

void accumulate_eoh(const GrayView& img, std::vector<double>& w) {
  constexpr double kBinWidth = 360.0 / kEohBins;
  for_each_interior(img, [&](const Neighborhood& nb) {
    const auto& n = nb.n;
    // Sobel; gy is flipped so angles grow counter-clockwise with "up" at 90°.
    const int gx = (n[7] + 2 * n[0] + n[1]) - (n[5] + 2 * n[4] + n[3]);
    const int gy = (n[5] + 2 * n[6] + n[7]) - (n[3] + 2 * n[2] + n[1]);
    if (gx == 0 && gy == 0) return;
    double deg = std::atan2(double(gy), double(gx)) * 180.0 / std::numbers::pi;
    if (deg < 0.0) deg += 360.0;
    const int bin = std::min(kEohBins - 1, static_cast<int>(deg / kBinWidth));
    w[bin] += std::hypot(double(gx), double(gy));
  });
}

}  // namespace

std::span<const DescriptorKernel> kernel_registry() { return kKernels; }

const DescriptorKernel& find_kernel(std::string_view name) {
  for (const auto& k : kKernels) {
    if (k.name == name) return k;
  }
  throw UnsupportedKernel(std::string(name));
}

double Histogram::sum() const { return std::accumulate(bins.begin(), bins.end(), 0.0); }

HistogramAccumulator::HistogramAccumulator(const DescriptorKernel& kernel)
    : kernel_(&kernel), weights_(static_cast<std::size_t>(kernel.bin_count), 0.0) {}

void HistogramAccumulator::add(const GrayView& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw ContractError("descriptor input must be at least 3x3, got " +
                        std::to_string(img.width()) + "x" + std::to_string(img.height()));
  }
  positions_ += static_cast<std::size_t>(img.width() - 2) * (img.height() - 2);
  using namespace patterns;
  auto& w = weights_;
  switch (kernel_->id) {
    case KernelId::GLD: count_codes(img, w, gray_level_difference); break;
    case KernelId::RT: count_codes(img, w, rank_transform); break;
    case KernelId::RTU: count_codes(img, w, reduced_texture_unit); break;
    case KernelId::LBP: count_codes(img, w, lbp); break;
    case KernelId::UniformLBP:
      count_codes(img, w, [](const Neighborhood& nb) { return uniform_bin(lbp(nb)); });
      break;
    case KernelId::MTS: count_codes(img, w, modified_texture_spectrum); break;
    case KernelId::CSLBP:
      count_codes(img, w, [](const Neighborhood& nb) { return cs_lbp(nb); });
      break;
    case KernelId::CBP:
      count_codes(img, w, [](const Neighborhood& nb) { return centralized_binary_pattern(nb); });
      break;
    case KernelId::BGC1: count_codes(img, w, bgc1); break;
    case KernelId::BGC2: count_codes(img, w, bgc2); break;
    case KernelId::BGC3: count_codes(img, w, bgc3); break;
    case KernelId::EOH: accumulate_eoh(img, w); break;
  }
}

Histogram HistogramAccumulator::finish() const {
  Histogram h{weights_, positions_};
  if (positions_ == 0) throw ContractError("histogram has no coded positions");
  const double total =
      kernel_->is_pattern ? static_cast<double>(positions_)
                          : std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (total > 0.0) {
    for (auto& b : h.bins) b /= total;
  } else {
    // Flat input carries no orientation; spread the mass evenly.
    std::fill(h.bins.begin(), h.bins.end(), 1.0 / static_cast<double>(h.bins.size()));
  }
  return h;
}

Histogram hep_histogram(const GrayView& img, const DescriptorKernel& kernel) {
  HistogramAccumulator acc(kernel);
  acc.add(img);
  return acc.finish();
}

}  // namespace smokedet
