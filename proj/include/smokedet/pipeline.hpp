#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "smokedet/candidate.hpp"
#include "smokedet/config.hpp"
#include "smokedet/ingest.hpp"
#include "smokedet/motion.hpp"
#include "smokedet/shi.hpp"
#include "smokedet/svm.hpp"

namespace smokedet {

// Classifiers used by the verification stages. `spacetime_top` is only read
// under Fusion::AndOfTwo, where `spacetime` then holds the BIFD-only model.
struct PipelineModels {
  std::optional<SvmModel> texture;
  std::optional<SvmModel> spacetime;
  std::optional<SvmModel> spacetime_top;
};

// Feature lengths the config implies for each model slot.
std::size_t texture_dims(const PipelineConfig& config);
std::size_t spacetime_dims(const PipelineConfig& config);
std::size_t spacetime_top_dims(const PipelineConfig& config);

/// Throws ConfigError when an enabled stage lacks a model or a model's
/// feature_dim disagrees with the config.
void check_models(const PipelineConfig& config, const PipelineModels& models);

// Surviving block counts after each stage. A disabled or still-warming stage
// passes its input through and is flagged here.
struct StageTrace {
  std::size_t candidate = 0;
  std::size_t motion = 0;
  std::size_t texture = 0;
  std::size_t spacetime = 0;
  std::size_t final = 0;
  bool spacetime_warm = false;

  friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

struct DetectionEvent {
  std::int64_t frame = 0;
  std::vector<BlockRef> blocks;
  StageTrace stages;

  friend bool operator==(const DetectionEvent&, const DetectionEvent&) = default;
};

struct FrameResult {
  std::int64_t frame = 0;
  StageTrace stages;
  BlockMask detected;  // verified blocks before the SHI gate
  BlockMask final;
  bool alarm = false;  // final.count() >= min_alarm_blocks
  double seconds = 0.0;
};

// Frame-by-frame detector. Owns all inter-frame state (previous frame, AMO
// window, q-frame history, SHI counters).
class SmokeDetector {
 public:
  /// Validates config and models up front.
  SmokeDetector(PipelineConfig config, PipelineModels models);

  FrameResult process(const Frame& frame);

  const PipelineConfig& config() const { return config_; }
  const std::optional<BlockGrid>& grid() const { return grid_; }
  const ShiMap* shi() const { return shi_ ? &*shi_ : nullptr; }

 private:
  void init(const Frame& first);
  bool verify_texture(const GrayImage& gray, BlockRef at) const;
  bool verify_spacetime(BlockRef at) const;

  PipelineConfig config_;
  PipelineModels models_;
  std::optional<BlockGrid> grid_;
  std::optional<AmoState> amo_;
  std::optional<ShiMap> shi_;
  std::deque<GrayFrame> history_;  // newest last, at most q frames
  std::optional<std::int64_t> last_index_;
};

struct MetricsReport {
  std::optional<std::int64_t> first_alarm_frame;
  std::optional<std::size_t> false_alarm_count;  // set when ground truth is known
  std::vector<double> frame_seconds;             // one per processed frame

  std::size_t frames() const { return frame_seconds.size(); }
};

struct RunOptions {
  std::function<void(const DetectionEvent&)> on_event;
  std::function<void(const FrameResult&)> on_frame;
  // When set, every frame is written as <dir>/f%04d.ppm with finally
  // alarmed blocks outlined in red.
  std::optional<std::filesystem::path> dump_frames;
  std::optional<std::int64_t> max_frames;
};

struct DetectionRun {
  std::vector<DetectionEvent> events;
  MetricsReport metrics;
};

DetectionRun run_detection(FrameSource& source, const PipelineConfig& config,
                           const PipelineModels& models, const RunOptions& options = {});

std::optional<std::int64_t> first_alarm_frame(const std::vector<DetectionEvent>& events);

// ---- ground truth ----------------------------------------------------------

struct FrameSpan {
  std::int64_t first = 0;  // inclusive
  std::int64_t last = 0;   // inclusive

  friend bool operator==(const FrameSpan&, const FrameSpan&) = default;
};

// Alarm-free spans of a video with a known frame count.
struct GroundTruth {
  std::int64_t frames = 0;
  std::vector<FrameSpan> clear;

  static GroundTruth non_smoke(std::int64_t frames) { return {frames, {{0, frames - 1}}}; }
};

/// Text format, one directive per line ('#' starts a comment):
///   frames N       video length (required, first directive)
///   nonsmoke       the whole video is alarm-free
///   clear A B      frames A..B inclusive are alarm-free
///   smoke A B      frames A..B contain smoke (informational)
GroundTruth parse_ground_truth(std::istream& in);
GroundTruth load_ground_truth(const std::filesystem::path& path);

/// Number of event frames inside alarm-free spans. Throws ContractError when
/// a span or an event lies outside [0, frames).
std::size_t false_alarm_count(const std::vector<DetectionEvent>& events, const GroundTruth& truth);

// ---- serialization ---------------------------------------------------------

std::string event_to_json(const DetectionEvent& event);
DetectionEvent event_from_json(const std::string& line);
std::vector<DetectionEvent> read_events(std::istream& in);

void write_metrics_csv(std::ostream& out, const MetricsReport& metrics);
void print_metrics_table(std::ostream& out, const MetricsReport& metrics);

/// Copy of `frame` with each alarmed block outlined by a 1-px red rectangle.
Frame annotate(const Frame& frame, const BlockGrid& grid, const BlockMask& alarmed);

// ---- training --------------------------------------------------------------

// Harvest totals for one class.
struct HarvestCounts {
  std::size_t videos = 0;
  std::size_t frames = 0;
  std::size_t texture_samples = 0;
  std::size_t volume_samples = 0;  // block volumes (BDAs)

  friend bool operator==(const HarvestCounts&, const HarvestCounts&) = default;
};

struct TrainingCorpus {
  std::vector<std::vector<double>> texture_x;
  std::vector<int> texture_y;
  std::vector<std::vector<double>> spacetime_x;  // fused, or BIFD only under AndOfTwo
  std::vector<std::vector<double>> top_x;        // AndOfTwo only
  std::vector<int> spacetime_y;
  HarvestCounts smoke;
  HarvestCounts nonsmoke;
};

/// Adds every stage-1 candidate block of `source` to the corpus with
/// `label`: a texture histogram from each frame t >= 1 and a space-time
/// feature once q frames are available.
void harvest(FrameSource& source, int label, const PipelineConfig& config, TrainingCorpus& corpus);

struct TrainedModels {
  PipelineModels models;
  EvalReport texture_eval;
  EvalReport spacetime_eval;
  std::optional<EvalReport> top_eval;
  HarvestCounts smoke;
  HarvestCounts nonsmoke;
};

/// Picks (C, gamma) per model with cross_eval over config.search_grid(), then
/// trains on every harvested sample. Each class is subsampled to at most
/// config.max_per_class samples with a seeded shuffle. Throws
/// InsufficientData when either class has fewer than 10 samples.
TrainedModels train_from_corpus(const TrainingCorpus& corpus, const PipelineConfig& config);

TrainedModels train_pipeline_models(const std::vector<std::filesystem::path>& smoke_sources,
                                    const std::vector<std::filesystem::path>& nonsmoke_sources,
                                    const PipelineConfig& config);

/// Writes texture.model, spacetime.model (and spacetime_top.model), the
/// config, harvest.csv and eval.csv into `dir`.
void save_trained(const std::filesystem::path& dir, const TrainedModels& trained,
                  const PipelineConfig& config);
PipelineModels load_models(const std::filesystem::path& texture_model,
                           const std::filesystem::path& spacetime_model,
                           const std::optional<std::filesystem::path>& top_model = std::nullopt);

void write_harvest_table(std::ostream& out, const TrainedModels& trained);

/// Video list: one path per line, relative to the list file; '#' comments.
std::vector<std::filesystem::path> read_video_list(const std::filesystem::path& manifest);

}  // namespace smokedet
