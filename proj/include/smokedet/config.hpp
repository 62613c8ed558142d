#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "smokedet/candidate.hpp"
#include "smokedet/svm.hpp"

namespace smokedet {

enum class Fusion { Concat, AndOfTwo };
enum class PairOrder { CGamma, GammaC, Both };

// Every tunable of the detector and the trainer. JSON keys mirror the
// field grouping, e.g. {"candidate": {"t_b": 4096, "color": {"spread": 20}}}.
struct PipelineConfig {
  // ingest
  int block_width = 32;
  int block_height = 32;

  // candidate
  std::optional<std::int64_t> t_b;  // defaults to 4 * block area
  ColorRuleParams color;

  // motion
  bool motion_enabled = true;
  int w_t = 15;
  double t_u = 0.55;
  int displacement = 3;

  // texture
  bool texture_enabled = true;
  std::string texture_kernel = "BGC3";

  // spacetime
  bool spacetime_enabled = true;
  int q = 5;
  Fusion fusion = Fusion::Concat;
  std::string top_kernel = "EOH";

  // shi
  bool shi_enabled = true;
  int shi_t_max = 15;
  int shi_threshold = 10;

  // video-level alarm: at least this many finally alarmed blocks
  int min_alarm_blocks = 1;

  // training
  ParamGrid grid = ParamGrid::defaults();
  PairOrder pair_order = PairOrder::Both;  // which reading of the grid pairs to search
  int repeats = 10;
  double split = 0.5;
  std::uint64_t seed = 1;
  std::size_t max_per_class = 1500;
  double svm_tol = 1e-3;
  int svm_max_passes = 10;

  std::int64_t moving_threshold() const {
    return t_b.value_or(4LL * block_width * block_height);
  }
  // Grid actually searched, after applying pair_order.
  ParamGrid search_grid() const;
  TrainOptions train_options(std::size_t zscore_dims = 0) const;

  /// Throws ConfigError on any out-of-range value.
  void validate() const;
};

/// Parses a JSON config; absent keys keep their defaults, unknown keys are
/// rejected.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);

}  // namespace smokedet
