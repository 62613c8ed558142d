// smokedet: command-line front end for detection, training, descriptor
// benchmarking, metric evaluation and synthetic scene generation.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "smokedet/benchmark.hpp"
#include "smokedet/config.hpp"
#include "smokedet/error.hpp"
#include "smokedet/pipeline.hpp"
#include "smokedet/synth.hpp"
#include "smokedet/texture.hpp"

namespace fs = std::filesystem;
using namespace smokedet;

namespace {

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

struct DetectArgs {
  std::string input;
  std::string format = "auto";
  std::string config;
  std::string texture_model;
  std::string spacetime_model;
  std::string top_model;
  std::string dump_frames;
  std::string metrics;
  std::string events;
  std::string truth;
  std::int64_t max_frames = 0;
};

int run_detect(const DetectArgs& a) {
  const PipelineConfig config = config_or_default(a.config);
  PipelineModels models;
  if (!a.texture_model.empty()) models.texture = load_model(a.texture_model);
  if (!a.spacetime_model.empty()) models.spacetime = load_model(a.spacetime_model);
  if (!a.top_model.empty()) models.spacetime_top = load_model(a.top_model);

  auto source = FrameSource::open(a.input, parse_source_format(a.format));
  std::ofstream events_file;
  std::ostream* events_out = &std::cout;
  if (!a.events.empty()) {
    events_file = open_out(a.events);
    events_out = &events_file;
  }
  RunOptions options;
  options.on_event = [&](const DetectionEvent& e) { *events_out << event_to_json(e) << '\n'; };
  if (!a.dump_frames.empty()) options.dump_frames = fs::path(a.dump_frames);
  if (a.max_frames > 0) options.max_frames = a.max_frames;

  DetectionRun run = run_detection(*source, config, models, options);
  if (!a.truth.empty()) run.metrics.false_alarm_count = false_alarm_count(run.events, load_ground_truth(a.truth));
  if (!a.metrics.empty()) {
    auto out = open_out(a.metrics);
    write_metrics_csv(out, run.metrics);
  }
  print_metrics_table(a.events.empty() ? std::cerr : std::cout, run.metrics);
  return 0;
}

int run_train(const std::string& smoke, const std::string& nonsmoke, const std::string& config_path,
              const std::string& out) {
  const PipelineConfig config = config_or_default(config_path);
  const TrainedModels trained =
      train_pipeline_models(read_video_list(smoke), read_video_list(nonsmoke), config);
  save_trained(out, trained, config);
  write_harvest_table(std::cout, trained);
  std::cout << "texture (C, gamma) = (" << trained.texture_eval.best_pair().C << ", "
            << trained.texture_eval.best_pair().gamma
            << "), mean accuracy " << trained.texture_eval.best_mean_accuracy << '\n';
  std::cout << "spacetime (C, gamma) = (" << trained.spacetime_eval.best_pair().C << ", "
            << trained.spacetime_eval.best_pair().gamma
            << "), mean accuracy " << trained.spacetime_eval.best_mean_accuracy << '\n';
  return 0;
}

int run_bench(const std::string& dataset, const std::string& kernels, const std::string& out,
              int repeats, std::uint64_t seed, bool select) {
  std::vector<std::string> names = split_list(kernels);
  if (names.empty() || kernels == "all") {
    names.clear();
    for (const auto& k : kernel_registry()) {
      if (k.is_pattern) names.emplace_back(k.name);
    }
  }
  BenchmarkOptions options;
  options.repeats = repeats;
  options.seed = seed;
  const auto rows = benchmark_descriptors(load_image_manifest(dataset), names, options);
  if (out.empty()) {
    write_benchmark_csv(std::cout, rows);
  } else {
    auto file = open_out(out);
    write_benchmark_csv(file, rows);
  }
  if (select) {
    const auto choice = select_descriptor(rows);
    std::cerr << "selected: " << (choice ? *choice : std::string("none")) << '\n';
  }
  return 0;
}

int run_eval(const std::string& events_path, const std::string& truth_path) {
  std::ifstream in(events_path);
  if (!in) throw IoError("cannot open events " + events_path);
  const auto events = read_events(in);
  MetricsReport m;
  m.first_alarm_frame = first_alarm_frame(events);
  if (!truth_path.empty()) m.false_alarm_count = false_alarm_count(events, load_ground_truth(truth_path));
  std::cout << "first alarm frame   "
            << (m.first_alarm_frame ? std::to_string(*m.first_alarm_frame) : "none") << '\n';
  std::cout << "false alarms        "
            << (m.false_alarm_count ? std::to_string(*m.false_alarm_count) : "n/a") << '\n';
  std::cout << "event frames        " << events.size() << '\n';
  return 0;
}

int run_synth(const std::string& kind, const std::string& out, SceneParams p) {
  p.kind = parse_scene_kind(kind);
  const auto frames = generate_scene(p);
  const fs::path path(out);
  if (path.extension() == ".y4m") {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    Y4mWriter writer(path, p.width, p.height);
    for (const auto& f : frames) writer.write(f);
  } else {
    write_ppm_sequence(path, frames);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-based video smoke detection"};
  app.require_subcommand(1);

  DetectArgs d;
  auto* detect = app.add_subcommand("detect", "Run the detector over a frame sequence");
  detect->add_option("--input", d.input, "PNM directory or .y4m file")->required();
  detect->add_option("--format", d.format, "auto, pnm or y4m");
  detect->add_option("--config", d.config, "JSON config (defaults when omitted)");
  detect->add_option("--texture-model", d.texture_model, "texture SVM model");
  detect->add_option("--spacetime-model", d.spacetime_model, "space-time SVM model");
  detect->add_option("--spacetime-top-model", d.top_model, "TOP model for and_of_two fusion");
  detect->add_option("--dump-frames", d.dump_frames, "write annotated PPM frames here");
  detect->add_option("--metrics", d.metrics, "write metrics CSV");
  detect->add_option("--events", d.events, "write events JSONL here instead of stdout");
  detect->add_option("--truth", d.truth, "ground-truth spans file for false-alarm counting");
  detect->add_option("--max-frames", d.max_frames, "stop after this many frames");

  std::string smoke, nonsmoke, train_config, train_out;
  auto* train = app.add_subcommand("train", "Harvest labeled videos and train both classifiers");
  train->add_option("--smoke", smoke, "list of smoke videos")->required();
  train->add_option("--nonsmoke", nonsmoke, "list of non-smoke videos")->required();
  train->add_option("--config", train_config, "JSON config");
  train->add_option("--out", train_out, "output directory")->required();

  std::string dataset, kernels = "all", bench_out;
  int repeats = 10;
  std::uint64_t seed = 1;
  bool select = false;
  auto* bench = app.add_subcommand("bench-descriptors", "Compare texture descriptors on labeled images");
  bench->add_option("--dataset", dataset, "image manifest (path<TAB>label)")->required();
  bench->add_option("--kernels", kernels, "comma-separated kernel names, or all");
  bench->add_option("--out", bench_out, "CSV output (stdout when omitted)");
  bench->add_option("--repeats", repeats, "split-repeat rounds");
  bench->add_option("--seed", seed, "split seed");
  bench->add_flag("--select", select, "print the descriptor chosen by the selection rule");

  std::string events_path, truth_path;
  auto* eval = app.add_subcommand("eval", "First-alarm frame and false alarms of an event stream");
  eval->add_option("--events", events_path, "events JSONL")->required();
  eval->add_option("--truth", truth_path, "ground-truth spans file");

  std::string kind = "plume", synth_out;
  SceneParams scene;
  auto* synth = app.add_subcommand("synth", "Render a synthetic test scene");
  synth->add_option("--kind", kind, "static, plume, red-object, gray-object or flicker");
  synth->add_option("--out", synth_out, "output .y4m file or PPM directory")->required();
  synth->add_option("--frames", scene.frames);
  synth->add_option("--width", scene.width);
  synth->add_option("--height", scene.height);
  synth->add_option("--onset", scene.onset);
  synth->add_option("--seed", scene.seed);
  synth->add_option("--vx", scene.velocity.dx, "object velocity, px/frame");
  synth->add_option("--vy", scene.velocity.dy, "object velocity, px/frame");

  auto* defaults = app.add_subcommand("config", "Print the default configuration as JSON");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*detect) return run_detect(d);
    if (*train) return run_train(smoke, nonsmoke, train_config, train_out);
    if (*bench) return run_bench(dataset, kernels, bench_out, repeats, seed, select);
    if (*eval) return run_eval(events_path, truth_path);
    if (*synth) return run_synth(kind, synth_out, scene);
    if (*defaults) {
      std::cout << config_to_json(PipelineConfig{}) << '\n';
      return 0;
    }
  } catch (const smokedet::Error& e) {
    std::cerr << "smokedet: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "smokedet: unexpected error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
