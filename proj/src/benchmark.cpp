#include "smokedet/benchmark.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "smokedet/error.hpp"
#include "smokedet/ingest.hpp"

namespace smokedet {

std::size_t LabeledImageSet::count(int label) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.label == label;
  return n;
}

int parse_label(std::string_view text) {
  if (text == "smoke" || text == "1" || text == "+1") return kSmoke;
  if (text == "non-smoke" || text == "nonsmoke" || text == "0" || text == "-1") return kNonSmoke;
  throw FormatError("unknown label '" + std::string(text) + "'");
}

std::string_view label_name(int label) { return label == kSmoke ? "smoke" : "non-smoke"; }

LabeledImageSet load_image_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  LabeledImageSet set;
  set.manifest = manifest;
  const auto base = manifest.parent_path();
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw FormatError(manifest.string() + ":" + std::to_string(lineno) +
                        ": expected path<TAB>label");
    }
    std::filesystem::path p = line.substr(0, tab);
    if (p.is_relative()) p = base / p;
    LabeledImage e;
    e.label = parse_label(line.substr(tab + 1));
    e.image = read_pnm_gray(p);
    e.source = p.string();
    set.entries.push_back(std::move(e));
  }
  return set;
}

int classify_texture(const Histogram& hist, const SvmModel& model) {
  if (hist.bins.size() != model.feature_dim) {
    throw ContractError("texture histogram has " + std::to_string(hist.bins.size()) +
                        " bins, model expects " + std::to_string(model.feature_dim));
  }
  return predict(model, hist.bins).label;
}

std::vector<BenchmarkRow> benchmark_descriptors(const LabeledImageSet& data,
                                                const std::vector<std::string>& kernels,
                                                const BenchmarkOptions& options) {
  if (data.count(kSmoke) == 0 || data.count(kNonSmoke) == 0) {
    throw ContractError("benchmark needs both smoke and non-smoke images");
  }
  if (options.repeats < 1) throw ContractError("benchmark: repeats must be >= 1");
  if (!(options.split > 0.0 && options.split < 1.0)) {
    throw ContractError("benchmark: split must lie in (0, 1)");
  }
  using Clock = std::chrono::steady_clock;
  std::vector<int> labels;
  for (const auto& e : data.entries) labels.push_back(e.label);

  std::vector<BenchmarkRow> rows;
  for (const auto& name : kernels) {
    const DescriptorKernel& kernel = find_kernel(name);
    std::vector<std::vector<double>> features;
    features.reserve(data.entries.size());
    const auto t0 = Clock::now();
    for (const auto& e : data.entries) features.push_back(hep_histogram(e.image, kernel).bins);
    const auto t1 = Clock::now();

    EvalTimings timings;
    const EvalReport report = cross_eval(features, labels, options.grid, options.repeats,
                                         options.split, options.seed, options.train, &timings);
    rows.push_back({std::string(kernel.name), report.best_mean_accuracy,
                    std::chrono::duration<double>(t1 - t0).count(),
                    static_cast<std::size_t>(kernel.bin_count),
                    timings.mean_recognize_seconds.at(report.best)});
  }
  return rows;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << "kernel,accuracy,extract_s,dims,recognize_s\n";
  for (const auto& r : rows) {
    out << r.kernel << ',' << std::setprecision(6) << r.accuracy << ',' << r.extract_s << ','
        << r.dims << ',' << r.recognize_s << '\n';
  }
}

std::optional<std::string> select_descriptor(const std::vector<BenchmarkRow>& rows,
                                             const SelectionCriteria& criteria) {
  if (rows.empty()) throw ContractError("select_descriptor: empty report");
  const BenchmarkRow* best = nullptr;
  for (const auto& r : rows) {
    if (r.accuracy < criteria.min_accuracy || r.extract_s > criteria.max_extract_s ||
        r.dims > criteria.max_dims) {
      continue;
    }
    if (!best || r.accuracy > best->accuracy ||
        (r.accuracy == best->accuracy && r.extract_s < best->extract_s)) {
      best = &r;
    }
  }
  if (!best) return std::nullopt;
  return best->kernel;
}

}  // namespace smokedet
