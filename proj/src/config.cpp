#include "smokedet/config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

#include "smokedet/error.hpp"
#include "smokedet/spacetime.hpp"
#include "smokedet/texture.hpp"

namespace smokedet {

using nlohmann::json;

ParamGrid PipelineConfig::search_grid() const {
  switch (pair_order) {
    case PairOrder::CGamma: return grid;
    case PairOrder::GammaC: return grid.swapped();
    case PairOrder::Both: {
      ParamGrid g = grid;
      for (const auto& p : grid.swapped().pairs) g.pairs.push_back(p);
      return g;
    }
  }
  return grid;
}

TrainOptions PipelineConfig::train_options(std::size_t zscore_dims) const {
  TrainOptions o;
  o.tol = svm_tol;
  o.max_passes = svm_max_passes;
  o.zscore_dims = zscore_dims;
  return o;
}

void PipelineConfig::validate() const {
  if (block_width < 3 || block_height < 3) throw ConfigError("block size must be at least 3x3");
  if (t_b && *t_b < 0) throw ConfigError("candidate.t_b must be >= 0");
  color.validate();
  if (w_t < 1) throw ConfigError("motion.w_t must be >= 1");
  if (!(t_u >= 0.0 && t_u <= 1.0)) throw ConfigError("motion.t_u must lie in [0, 1]");
  if (displacement < 1) throw ConfigError("motion.displacement must be >= 1");
  try {
    find_kernel(texture_kernel);
    find_kernel(top_kernel);
  } catch (const UnsupportedKernel& e) {
    throw ConfigError(e.what());
  }
  if (q < 3) throw ConfigError("spacetime.q must be >= 3");
  if (!(0 < shi_threshold && shi_threshold <= shi_t_max)) {
    throw ConfigError("shi requires 0 < threshold <= t_max");
  }
  if (min_alarm_blocks < 1) throw ConfigError("pipeline.min_alarm_blocks must be >= 1");
  grid.validate();
  if (repeats < 1) throw ConfigError("svm.repeats must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw ConfigError("svm.split must lie in (0, 1)");
  if (max_per_class < 10) throw ConfigError("train.max_per_class must be >= 10");
  if (!(svm_tol > 0.0)) throw ConfigError("svm.tol must be > 0");
  if (svm_max_passes < 1) throw ConfigError("svm.max_passes must be >= 1");
}

namespace {

void check_keys(const json& obj, std::string_view section,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError("config section '" + std::string(section) + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      throw ConfigError("unknown config key '" + (section.empty() ? "" : std::string(section) + ".") +
                        key + "'");
    }
  }
}

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

const char* fusion_name(Fusion f) { return f == Fusion::Concat ? "concat" : "and_of_two"; }

const char* pair_order_name(PairOrder p) {
  switch (p) {
    case PairOrder::CGamma: return "c_gamma";
    case PairOrder::GammaC: return "gamma_c";
    case PairOrder::Both: return "both";
  }
  return "c_gamma";
}

}  // namespace

PipelineConfig parse_config(std::string_view json_text) {
  PipelineConfig c;
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  try {
    check_keys(root, "", {"block", "candidate", "motion", "texture", "spacetime", "shi",
                          "pipeline", "svm", "train"});
    if (root.contains("block")) {
      const json& b = root["block"];
      check_keys(b, "block", {"width", "height"});
      read(b, "width", c.block_width);
      read(b, "height", c.block_height);
    }
    if (root.contains("candidate")) {
      const json& s = root["candidate"];
      check_keys(s, "candidate", {"t_b", "color"});
      if (s.contains("t_b") && !s["t_b"].is_null()) c.t_b = s["t_b"].get<std::int64_t>();
      if (s.contains("color")) {
        const json& col = s["color"];
        check_keys(col, "candidate.color", {"spread", "low", "high", "min_fraction"});
        read(col, "spread", c.color.max_channel_spread);
        read(col, "low", c.color.intensity_low);
        read(col, "high", c.color.intensity_high);
        read(col, "min_fraction", c.color.min_fraction);
      }
    }
    if (root.contains("motion")) {
      const json& s = root["motion"];
      check_keys(s, "motion", {"enabled", "w_t", "t_u", "displacement"});
      read(s, "enabled", c.motion_enabled);
      read(s, "w_t", c.w_t);
      read(s, "t_u", c.t_u);
      read(s, "displacement", c.displacement);
    }
    if (root.contains("texture")) {
      const json& s = root["texture"];
      check_keys(s, "texture", {"enabled", "kernel"});
      read(s, "enabled", c.texture_enabled);
      read(s, "kernel", c.texture_kernel);
    }
    if (root.contains("spacetime")) {
      const json& s = root["spacetime"];
      check_keys(s, "spacetime", {"enabled", "q", "fusion", "top_kernel"});
      read(s, "enabled", c.spacetime_enabled);
      read(s, "q", c.q);
      read(s, "top_kernel", c.top_kernel);
      if (s.contains("fusion")) {
        const auto f = s["fusion"].get<std::string>();
        if (f == "concat") {
          c.fusion = Fusion::Concat;
        } else if (f == "and_of_two") {
          c.fusion = Fusion::AndOfTwo;
        } else {
          throw ConfigError("spacetime.fusion must be concat or and_of_two");
        }
      }
    }
    if (root.contains("shi")) {
      const json& s = root["shi"];
      check_keys(s, "shi", {"enabled", "t_max", "threshold"});
      read(s, "enabled", c.shi_enabled);
      read(s, "t_max", c.shi_t_max);
      read(s, "threshold", c.shi_threshold);
    }
    if (root.contains("pipeline")) {
      const json& s = root["pipeline"];
      check_keys(s, "pipeline", {"min_alarm_blocks"});
      read(s, "min_alarm_blocks", c.min_alarm_blocks);
    }
    if (root.contains("svm")) {
      const json& s = root["svm"];
      check_keys(s, "svm", {"grid", "pair_order", "repeats", "split", "seed", "tol", "max_passes"});
      if (s.contains("grid")) {
        c.grid.pairs.clear();
        for (const auto& p : s["grid"]) {
          if (!p.is_array() || p.size() != 2) throw ConfigError("svm.grid entries are [a, b] pairs");
          c.grid.pairs.push_back({p[0].get<double>(), p[1].get<double>()});
        }
      }
      if (s.contains("pair_order")) {
        const auto o = s["pair_order"].get<std::string>();
        if (o == "c_gamma") {
          c.pair_order = PairOrder::CGamma;
        } else if (o == "gamma_c") {
          c.pair_order = PairOrder::GammaC;
        } else if (o == "both") {
          c.pair_order = PairOrder::Both;
        } else {
          throw ConfigError("svm.pair_order must be c_gamma, gamma_c or both");
        }
      }
      read(s, "repeats", c.repeats);
      read(s, "split", c.split);
      read(s, "seed", c.seed);
      read(s, "tol", c.svm_tol);
      read(s, "max_passes", c.svm_max_passes);
    }
    if (root.contains("train")) {
      const json& s = root["train"];
      check_keys(s, "train", {"max_per_class"});
      read(s, "max_per_class", c.max_per_class);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const PipelineConfig& c) {
  json grid = json::array();
  for (const auto& p : c.grid.pairs) grid.push_back({p.C, p.gamma});
  json j = {
      {"block", {{"width", c.block_width}, {"height", c.block_height}}},
      {"candidate",
       {{"t_b", c.moving_threshold()},
        {"color",
         {{"spread", c.color.max_channel_spread},
          {"low", c.color.intensity_low},
          {"high", c.color.intensity_high},
          {"min_fraction", c.color.min_fraction}}}}},
      {"motion",
       {{"enabled", c.motion_enabled},
        {"w_t", c.w_t},
        {"t_u", c.t_u},
        {"displacement", c.displacement}}},
      {"texture", {{"enabled", c.texture_enabled}, {"kernel", c.texture_kernel}}},
      {"spacetime",
       {{"enabled", c.spacetime_enabled},
        {"q", c.q},
        {"fusion", fusion_name(c.fusion)},
        {"top_kernel", c.top_kernel}}},
      {"shi", {{"enabled", c.shi_enabled}, {"t_max", c.shi_t_max}, {"threshold", c.shi_threshold}}},
      {"pipeline", {{"min_alarm_blocks", c.min_alarm_blocks}}},
      {"svm",
       {{"grid", grid},
        {"pair_order", pair_order_name(c.pair_order)},
        {"repeats", c.repeats},
        {"split", c.split},
        {"seed", c.seed},
        {"tol", c.svm_tol},
        {"max_passes", c.svm_max_passes}}},
      {"train", {{"max_per_class", c.max_per_class}}},
  };
  return j.dump(2);
}

}  // namespace smokedet
