#include "smokedet/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "smokedet/benchmark.hpp"
#include "smokedet/error.hpp"
#include "smokedet/spacetime.hpp"
#include "smokedet/texture.hpp"

namespace smokedet {

namespace fs = std::filesystem;
using nlohmann::json;

std::size_t texture_dims(const PipelineConfig& config) {
  return static_cast<std::size_t>(find_kernel(config.texture_kernel).bin_count);
}

std::size_t spacetime_dims(const PipelineConfig& config) {
  return config.fusion == Fusion::Concat ? spacetime_feature_length(config.q, config.top_kernel)
                                         : bifd_cm_length(config.q);
}

std::size_t spacetime_top_dims(const PipelineConfig& config) { return top_length(config.top_kernel); }

namespace {

void check_slot(const std::optional<SvmModel>& model, std::size_t dims, const char* slot) {
  if (!model) throw ConfigError(std::string(slot) + " model is required by the config");
  if (model->feature_dim != dims) {
    throw ConfigError(std::string(slot) + " model has " + std::to_string(model->feature_dim) +
                      " features, config implies " + std::to_string(dims));
  }
}

}  // namespace

void check_models(const PipelineConfig& config, const PipelineModels& models) {
  if (config.texture_enabled) check_slot(models.texture, texture_dims(config), "texture");
  if (config.spacetime_enabled) {
    check_slot(models.spacetime, spacetime_dims(config), "spacetime");
    if (config.fusion == Fusion::AndOfTwo) {
      check_slot(models.spacetime_top, spacetime_top_dims(config), "spacetime TOP");
    }
  }
}

// ---- detector ----------------------------------------------------------------

SmokeDetector::SmokeDetector(PipelineConfig config, PipelineModels models)
    : config_(std::move(config)), models_(std::move(models)) {
  config_.validate();
  check_models(config_, models_);
}

void SmokeDetector::init(const Frame& first) {
  grid_ = make_grid(first.width, first.height, config_.block_width, config_.block_height);
  amo_.emplace(*grid_, config_.w_t);
  if (config_.shi_enabled) shi_.emplace(grid_->rows, grid_->cols, config_.shi_t_max, config_.shi_threshold);
}

bool SmokeDetector::verify_texture(const GrayImage& gray, BlockRef at) const {
  const Histogram h = hep_histogram(block_pixels(gray, *grid_, at), find_kernel(config_.texture_kernel));
  return predict(*models_.texture, h.bins).label == kSmoke;
}

bool SmokeDetector::verify_spacetime(BlockRef at) const {
  std::vector<const GrayFrame*> frames;
  frames.reserve(history_.size());
  for (const auto& f : history_) frames.push_back(&f);
  const BlockVolume volume = BlockVolume::from_frames(frames, *grid_, at);
  if (config_.fusion == Fusion::Concat) {
    return predict(*models_.spacetime, spacetime_feature(volume, config_.top_kernel).values).label ==
           kSmoke;
  }
  return predict(*models_.spacetime, bifd_cm(build_bda(volume)).values).label == kSmoke &&
         predict(*models_.spacetime_top, top_descriptor(volume, config_.top_kernel).values).label ==
             kSmoke;
}

FrameResult SmokeDetector::process(const Frame& frame) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  if (last_index_ && frame.index != *last_index_ + 1) {
    throw ContractError("frame " + std::to_string(frame.index) + " does not follow frame " +
                        std::to_string(*last_index_));
  }
  if (!grid_) {
    init(frame);
  } else if (frame.width != history_.back().width || frame.height != history_.back().height) {
    throw FormatError("frame " + std::to_string(frame.index) + " changes the frame size");
  }

  FrameResult r;
  r.frame = frame.index;
  GrayFrame gray = to_grayscale(frame);
  gray.index = frame.index;
  BlockMask mask(*grid_);

  if (!history_.empty()) {
    const GrayFrame& prev = history_.back();
    mask = candidate_blocks(moving_blocks(prev, gray, *grid_, config_.moving_threshold()),
                            smoke_colored_blocks(frame, *grid_, config_.color));
    r.stages.candidate = mask.count();

    if (config_.motion_enabled) {
      amo_->push(block_directions(prev, gray, *grid_, config_.displacement));
      mask = filter_by_umr(mask, *amo_, config_.t_u);
    }
    r.stages.motion = mask.count();

    if (config_.texture_enabled) {
      for (const BlockRef at : mask.blocks()) {
        if (!verify_texture(gray, at)) mask.set(at, false);
      }
    }
    r.stages.texture = mask.count();
  }

  history_.push_back(std::move(gray));
  while (history_.size() > static_cast<std::size_t>(std::max(config_.q, 2))) history_.pop_front();

  r.stages.spacetime_warm = history_.size() >= static_cast<std::size_t>(config_.q);
  if (config_.spacetime_enabled && r.stages.spacetime_warm) {
    for (const BlockRef at : mask.blocks()) {
      if (!verify_spacetime(at)) mask.set(at, false);
    }
  }
  r.stages.spacetime = mask.count();

  r.detected = mask;
  r.final = shi_ ? shi_->decide_and_update(mask) : mask;
  r.stages.final = r.final.count();
  r.alarm = r.stages.final >= static_cast<std::size_t>(config_.min_alarm_blocks);
  last_index_ = frame.index;
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

// ---- runs and metrics --------------------------------------------------------

Frame annotate(const Frame& frame, const BlockGrid& grid, const BlockMask& alarmed) {
  Frame out = frame;
  const Rgb red{255, 0, 0};
  for (const BlockRef at : alarmed.blocks()) {
    const Rect rc = block_rect(grid, at);
    for (int x = rc.x; x < rc.x + rc.width; ++x) {
      out.at(x, rc.y) = red;
      out.at(x, rc.y + rc.height - 1) = red;
    }
    for (int y = rc.y; y < rc.y + rc.height; ++y) {
      out.at(rc.x, y) = red;
      out.at(rc.x + rc.width - 1, y) = red;
    }
  }
  return out;
}

DetectionRun run_detection(FrameSource& source, const PipelineConfig& config,
                           const PipelineModels& models, const RunOptions& options) {
  SmokeDetector detector(config, models);
  if (options.dump_frames) fs::create_directories(*options.dump_frames);
  DetectionRun run;
  while (!options.max_frames || static_cast<std::int64_t>(run.metrics.frames()) < *options.max_frames) {
    std::optional<Frame> frame = source.next();
    if (!frame) break;
    FrameResult r = detector.process(*frame);
    run.metrics.frame_seconds.push_back(r.seconds);
    if (options.on_frame) options.on_frame(r);
    if (r.alarm) {
      DetectionEvent e{r.frame, r.final.blocks(), r.stages};
      if (options.on_event) options.on_event(e);
      run.events.push_back(std::move(e));
    }
    if (options.dump_frames) {
      char name[32];
      std::snprintf(name, sizeof name, "f%04lld.ppm", static_cast<long long>(r.frame));
      write_ppm(*options.dump_frames / name, annotate(*frame, *detector.grid(), r.final));
    }
  }
  run.metrics.first_alarm_frame = first_alarm_frame(run.events);
  return run;
}

std::optional<std::int64_t> first_alarm_frame(const std::vector<DetectionEvent>& events) {
  std::optional<std::int64_t> first;
  for (const auto& e : events) {
    if (!first || e.frame < *first) first = e.frame;
  }
  return first;
}

GroundTruth parse_ground_truth(std::istream& in) {
  GroundTruth truth;
  bool have_frames = false;
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("ground truth line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    if (word == "frames") {
      if (!(ss >> truth.frames) || truth.frames < 1) fail("frames needs a positive count");
      have_frames = true;
      continue;
    }
    if (!have_frames) fail("'frames N' must come first");
    if (word == "nonsmoke") {
      truth.clear.push_back({0, truth.frames - 1});
    } else if (word == "clear" || word == "smoke") {
      FrameSpan span;
      if (!(ss >> span.first >> span.last) || span.last < span.first) fail("expected A B with A <= B");
      if (word == "clear") truth.clear.push_back(span);
    } else {
      fail("unknown directive '" + word + "'");
    }
    if (std::string extra; ss >> extra) fail("trailing text '" + extra + "'");
  }
  if (!have_frames) throw FormatError("ground truth has no 'frames N' line");
  return truth;
}

GroundTruth load_ground_truth(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ground truth " + path.string());
  return parse_ground_truth(in);
}

std::size_t false_alarm_count(const std::vector<DetectionEvent>& events, const GroundTruth& truth) {
  for (const auto& s : truth.clear) {
    if (s.first < 0 || s.last >= truth.frames || s.last < s.first) {
      throw ContractError("alarm-free span [" + std::to_string(s.first) + ", " +
                          std::to_string(s.last) + "] lies outside a " +
                          std::to_string(truth.frames) + "-frame video");
    }
  }
  std::size_t n = 0;
  for (const auto& e : events) {
    if (e.frame < 0 || e.frame >= truth.frames) {
      throw ContractError("event frame " + std::to_string(e.frame) + " lies outside the video");
    }
    n += std::any_of(truth.clear.begin(), truth.clear.end(),
                     [&](const FrameSpan& s) { return s.first <= e.frame && e.frame <= s.last; });
  }
  return n;
}

std::string event_to_json(const DetectionEvent& e) {
  json blocks = json::array();
  for (const auto& b : e.blocks) blocks.push_back({b.row, b.col});
  json j = {{"frame", e.frame},
            {"blocks", blocks},
            {"stages",
             {{"candidate", e.stages.candidate},
              {"motion", e.stages.motion},
              {"texture", e.stages.texture},
              {"spacetime", e.stages.spacetime},
              {"final", e.stages.final},
              {"spacetime_warm", e.stages.spacetime_warm}}}};
  return j.dump();
}

DetectionEvent event_from_json(const std::string& line) {
  try {
    const json j = json::parse(line);
    DetectionEvent e;
    e.frame = j.at("frame").get<std::int64_t>();
    for (const auto& b : j.at("blocks")) e.blocks.push_back({b.at(0).get<int>(), b.at(1).get<int>()});
    if (j.contains("stages")) {
      const json& s = j["stages"];
      e.stages.candidate = s.value("candidate", std::size_t{0});
      e.stages.motion = s.value("motion", std::size_t{0});
      e.stages.texture = s.value("texture", std::size_t{0});
      e.stages.spacetime = s.value("spacetime", std::size_t{0});
      e.stages.final = s.value("final", std::size_t{0});
      e.stages.spacetime_warm = s.value("spacetime_warm", false);
    }
    return e;
  } catch (const json::exception& ex) {
    throw FormatError(std::string("bad event record: ") + ex.what());
  }
}

std::vector<DetectionEvent> read_events(std::istream& in) {
  std::vector<DetectionEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    events.push_back(event_from_json(line));
  }
  return events;
}

namespace {

struct TimingSummary {
  double total = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

TimingSummary summarize(const std::vector<double>& s) {
  TimingSummary t;
  for (double v : s) {
    t.total += v;
    t.max = std::max(t.max, v);
  }
  if (!s.empty()) t.mean = t.total / static_cast<double>(s.size());
  return t;
}

}  // namespace

void write_metrics_csv(std::ostream& out, const MetricsReport& m) {
  const TimingSummary t = summarize(m.frame_seconds);
  out << "frames,first_alarm_frame,false_alarm_count,total_s,mean_frame_s,max_frame_s\n";
  out << m.frames() << ',';
  if (m.first_alarm_frame) out << *m.first_alarm_frame;
  out << ',';
  if (m.false_alarm_count) out << *m.false_alarm_count;
  out << ',' << std::setprecision(6) << t.total << ',' << t.mean << ',' << t.max << '\n';
}

void print_metrics_table(std::ostream& out, const MetricsReport& m) {
  const TimingSummary t = summarize(m.frame_seconds);
  auto row = [&](const char* k, const std::string& v) {
    out << std::left << std::setw(20) << k << v << '\n';
  };
  row("frames", std::to_string(m.frames()));
  row("first alarm frame", m.first_alarm_frame ? std::to_string(*m.first_alarm_frame) : "none");
  row("false alarms", m.false_alarm_count ? std::to_string(*m.false_alarm_count) : "n/a");
  std::ostringstream ms;
  ms << std::fixed << std::setprecision(2) << t.mean * 1e3 << " ms (max " << t.max * 1e3 << " ms)";
  row("time per frame", ms.str());
}

// ---- training ----------------------------------------------------------------

void harvest(FrameSource& source, int label, const PipelineConfig& config, TrainingCorpus& corpus) {
  config.validate();
  HarvestCounts& counts = label == kSmoke ? corpus.smoke : corpus.nonsmoke;
  const DescriptorKernel& kernel = find_kernel(config.texture_kernel);
  std::deque<GrayFrame> history;
  std::optional<BlockGrid> grid;
  ++counts.videos;
  while (std::optional<Frame> frame = source.next()) {
    ++counts.frames;
    if (!grid) grid = make_grid(frame->width, frame->height, config.block_width, config.block_height);
    GrayFrame gray = to_grayscale(*frame);
    gray.index = frame->index;
    std::vector<BlockRef> blocks;
    if (!history.empty()) {
      blocks = candidate_blocks(moving_blocks(history.back(), gray, *grid, config.moving_threshold()),
                                smoke_colored_blocks(*frame, *grid, config.color))
                   .blocks();
    }
    for (const BlockRef at : blocks) {
      corpus.texture_x.push_back(hep_histogram(block_pixels(gray, *grid, at), kernel).bins);
      corpus.texture_y.push_back(label);
      ++counts.texture_samples;
    }
    history.push_back(std::move(gray));
    if (history.size() > static_cast<std::size_t>(config.q)) history.pop_front();
    if (history.size() < static_cast<std::size_t>(config.q)) continue;

    std::vector<const GrayFrame*> frames;
    for (const auto& f : history) frames.push_back(&f);
    for (const BlockRef at : blocks) {
      const BlockVolume volume = BlockVolume::from_frames(frames, *grid, at);
      if (config.fusion == Fusion::Concat) {
        corpus.spacetime_x.push_back(spacetime_feature(volume, config.top_kernel).values);
      } else {
        corpus.spacetime_x.push_back(bifd_cm(build_bda(volume)).values);
        corpus.top_x.push_back(top_descriptor(volume, config.top_kernel).values);
      }
      corpus.spacetime_y.push_back(label);
      ++counts.volume_samples;
    }
  }
}

namespace {

struct Subset {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

// Seeded per-class cap; keeps the original order of the retained samples.
std::vector<std::size_t> cap_indices(const std::vector<int>& labels, std::size_t max_per_class,
                                     std::uint64_t seed, const char* what) {
  std::vector<std::size_t> keep;
  for (int label : {kSmoke, kNonSmoke}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) idx.push_back(i);
    }
    if (idx.size() < 10) {
      throw InsufficientData(std::string(what) + ": only " + std::to_string(idx.size()) + " " +
                             std::string(label_name(label)) + " samples harvested, need 10");
    }
    if (idx.size() > max_per_class) {
      std::mt19937_64 rng(seed + static_cast<std::uint64_t>(label + 1));
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(max_per_class);
    }
    keep.insert(keep.end(), idx.begin(), idx.end());
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

Subset take(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
            const std::vector<std::size_t>& idx) {
  Subset s;
  for (std::size_t i : idx) {
    s.x.push_back(x[i]);
    s.y.push_back(y[i]);
  }
  return s;
}

SvmModel fit_best(const Subset& data, const PipelineConfig& config, std::size_t zscore_dims,
                  std::string layout, EvalReport& report) {
  const TrainOptions options = config.train_options(zscore_dims);
  report = cross_eval(data.x, data.y, config.search_grid(), config.repeats, config.split,
                      config.seed, options);
  const ParamPair best = report.best_pair();
  SvmModel model = train_svm(data.x, data.y, best.C, best.gamma, options);
  model.layout = std::move(layout);
  return model;
}

}  // namespace

TrainedModels train_from_corpus(const TrainingCorpus& corpus, const PipelineConfig& config) {
  config.validate();
  TrainedModels out;
  out.smoke = corpus.smoke;
  out.nonsmoke = corpus.nonsmoke;

  const Subset tex = take(corpus.texture_x, corpus.texture_y,
                          cap_indices(corpus.texture_y, config.max_per_class, config.seed, "texture"));
  out.models.texture = fit_best(tex, config, 0, "TEXTURE:" + config.texture_kernel, out.texture_eval);

  const auto st_idx = cap_indices(corpus.spacetime_y, config.max_per_class, config.seed, "spacetime");
  const std::size_t bifd_dims = bifd_cm_length(config.q);
  if (config.fusion == Fusion::Concat) {
    out.models.spacetime = fit_best(take(corpus.spacetime_x, corpus.spacetime_y, st_idx), config,
                                    bifd_dims, "FUSED:" + config.top_kernel, out.spacetime_eval);
  } else {
    out.models.spacetime = fit_best(take(corpus.spacetime_x, corpus.spacetime_y, st_idx), config,
                                    bifd_dims, "BIFD_CM", out.spacetime_eval);
    EvalReport top;
    out.models.spacetime_top = fit_best(take(corpus.top_x, corpus.spacetime_y, st_idx), config, 0,
                                        "TOP:" + config.top_kernel, top);
    out.top_eval = std::move(top);
  }
  return out;
}

TrainedModels train_pipeline_models(const std::vector<fs::path>& smoke_sources,
                                    const std::vector<fs::path>& nonsmoke_sources,
                                    const PipelineConfig& config) {
  if (smoke_sources.empty()) throw InsufficientData("no smoke videos given");
  if (nonsmoke_sources.empty()) throw InsufficientData("no non-smoke videos given");
  TrainingCorpus corpus;
  for (const auto& p : smoke_sources) {
    auto src = FrameSource::open(p);
    harvest(*src, kSmoke, config, corpus);
  }
  for (const auto& p : nonsmoke_sources) {
    auto src = FrameSource::open(p);
    harvest(*src, kNonSmoke, config, corpus);
  }
  return train_from_corpus(corpus, config);
}

void write_harvest_table(std::ostream& out, const TrainedModels& t) {
  out << "class,videos,frames,texture_samples,bda_count\n";
  auto row = [&](const char* name, const HarvestCounts& c) {
    out << name << ',' << c.videos << ',' << c.frames << ',' << c.texture_samples << ','
        << c.volume_samples << '\n';
  };
  row("smoke", t.smoke);
  row("non-smoke", t.nonsmoke);
}

namespace {

void write_eval_rows(std::ostream& out, const char* model, const EvalReport& r) {
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& p = r.pairs[i];
    out << model << ',' << std::setprecision(10) << p.params.C << ',' << p.params.gamma << ','
        << p.mean_accuracy << ',' << (i == r.best ? 1 : 0) << '\n';
  }
}

}  // namespace

void save_trained(const fs::path& dir, const TrainedModels& t, const PipelineConfig& config) {
  fs::create_directories(dir);
  save_model(dir / "texture.model", *t.models.texture);
  save_model(dir / "spacetime.model", *t.models.spacetime);
  if (t.models.spacetime_top) save_model(dir / "spacetime_top.model", *t.models.spacetime_top);
  {
    std::ofstream out(dir / "config.json");
    out << config_to_json(config) << '\n';
  }
  {
    std::ofstream out(dir / "harvest.csv");
    write_harvest_table(out, t);
  }
  std::ofstream out(dir / "eval.csv");
  out << "model,C,gamma,mean_accuracy,selected\n";
  write_eval_rows(out, "texture", t.texture_eval);
  write_eval_rows(out, "spacetime", t.spacetime_eval);
  if (t.top_eval) write_eval_rows(out, "spacetime_top", *t.top_eval);
  if (!out) throw IoError("cannot write " + (dir / "eval.csv").string());
}

PipelineModels load_models(const fs::path& texture_model, const fs::path& spacetime_model,
                           const std::optional<fs::path>& top_model) {
  PipelineModels m;
  m.texture = load_model(texture_model);
  m.spacetime = load_model(spacetime_model);
  if (top_model) m.spacetime_top = load_model(*top_model);
  return m;
}

std::vector<fs::path> read_video_list(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open video list " + manifest.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    // Tolerate a trailing label column as in image manifests.
    if (const auto tab = line.find('\t'); tab != std::string::npos) line.erase(tab);
    fs::path p = line;
    if (p.is_relative()) p = manifest.parent_path() / p;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace smokedet
