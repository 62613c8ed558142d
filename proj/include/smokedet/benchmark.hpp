#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smokedet/image.hpp"
#include "smokedet/svm.hpp"
#include "smokedet/texture.hpp"

namespace smokedet {

struct LabeledImage {
  GrayImage image;
  int label = kSmoke;
  std::string source;
};

struct LabeledImageSet {
  std::vector<LabeledImage> entries;
  std::filesystem::path manifest;

  std::size_t count(int label) const;
};

int parse_label(std::string_view text);
std::string_view label_name(int label);

/// Manifest lines are `path<TAB>label` with label smoke|non-smoke (also
/// accepts 1/0 and +1/-1). Relative paths resolve against the manifest's
/// directory; blank lines and lines starting with '#' are skipped.
LabeledImageSet load_image_manifest(const std::filesystem::path& manifest);

/// Label of a block from its texture histogram.
int classify_texture(const Histogram& hist, const SvmModel& model);

struct BenchmarkRow {
  std::string kernel;
  double accuracy = 0.0;     // best mean accuracy over the parameter grid
  double extract_s = 0.0;    // wall-clock, all images
  std::size_t dims = 0;
  double recognize_s = 0.0;  // wall-clock, one test half, best pair

  friend bool operator==(const BenchmarkRow&, const BenchmarkRow&) = default;
};

struct BenchmarkOptions {
  ParamGrid grid = ParamGrid::defaults();
  int repeats = 10;
  double split = 0.5;
  std::uint64_t seed = 1;
  TrainOptions train;
};

std::vector<BenchmarkRow> benchmark_descriptors(const LabeledImageSet& data,
                                                const std::vector<std::string>& kernels,
                                                const BenchmarkOptions& options = {});

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

struct SelectionCriteria {
  double min_accuracy = 0.975;
  double max_extract_s = 20.0;
  std::size_t max_dims = 256;
};

/// Highest accuracy among rows meeting all criteria, ties to the faster
/// extractor; nullopt when nothing qualifies.
std::optional<std::string> select_descriptor(const std::vector<BenchmarkRow>& rows,
                                             const SelectionCriteria& criteria = {});

}  // namespace smokedet
