#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace smokedet {

// Binary labels used throughout: +1 smoke, -1 non-smoke.
inline constexpr int kSmoke = 1;
inline constexpr int kNonSmoke = -1;

// Per-feature affine map x' = (x - mean) * inv_std applied to the leading
// mean.size() features; remaining features pass through untouched.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> inv_std;

  bool empty() const { return mean.empty(); }
  void apply(std::span<double> x) const;

  static FeatureScaler fit(const std::vector<std::vector<double>>& samples, std::size_t dims);
};

// RBF-kernel SVM decision function f(x) = sum_i coef_i K(sv_i, x) + bias,
// with coef_i = alpha_i * y_i.
struct SvmModel {
  double gamma = 0.0;
  double C = 0.0;
  double bias = 0.0;
  std::size_t feature_dim = 0;
  std::vector<double> coef;
  std::vector<double> support;  // coef.size() rows of feature_dim values
  FeatureScaler scaler;
  std::string layout;  // free-form feature layout tag, checked by the pipeline

  std::size_t support_count() const { return coef.size(); }
  std::span<const double> support_vector(std::size_t i) const {
    return {support.data() + i * feature_dim, feature_dim};
  }
};

struct TrainOptions {
  double tol = 1e-3;
  // Stop after this many consecutive sweeps (n pair updates each) that fail
  // to lower the dual objective.
  int max_passes = 10;
  std::int64_t max_iterations = 10'000'000;
  // z-score the first `zscore_dims` features with training statistics.
  std::size_t zscore_dims = 0;
};

struct TrainStats {
  std::int64_t iterations = 0;
  double kkt_gap = 0.0;
  bool converged = false;
};

/// Trains a C-SVC with kernel exp(-gamma |x - z|^2). Labels must be +1/-1 and
/// both must be present; all features must be finite.
SvmModel train_svm(const std::vector<std::vector<double>>& samples, const std::vector<int>& labels,
                   double C, double gamma, const TrainOptions& options = {},
                   TrainStats* stats = nullptr);

struct Prediction {
  int label = kSmoke;
  double margin = 0.0;
};

/// sign(0) is +1.
Prediction predict(const SvmModel& model, std::span<const double> x);

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// ---- parameter search ------------------------------------------------------

struct ParamPair {
  double C = 1.0;
  double gamma = 1.0;

  friend bool operator==(const ParamPair&, const ParamPair&) = default;
};

struct ParamGrid {
  std::vector<ParamPair> pairs;

  // The five published texture-classification pairs, read as (C, gamma).
  static ParamGrid defaults();
  // Same numbers read as (gamma, C).
  ParamGrid swapped() const;
  void validate() const;
};

struct PairResult {
  ParamPair params;
  std::vector<double> accuracies;  // one per repeat
  double mean_accuracy = 0.0;

  friend bool operator==(const PairResult&, const PairResult&) = default;
};

struct EvalReport {
  std::vector<PairResult> pairs;
  std::size_t best = 0;
  double best_mean_accuracy = 0.0;
  std::size_t training_runs = 0;

  const ParamPair& best_pair() const { return pairs.at(best).params; }
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Wall-clock companion of an EvalReport; kept apart so reports stay
// reproducible.
struct EvalTimings {
  std::vector<double> mean_train_seconds;
  std::vector<double> mean_recognize_seconds;  // whole test half, per round
};

/// For each pair, `repeats` rounds of a stratified random split (`split` of
/// every class goes to training); reports mean test accuracy per pair. Round r
/// uses the same split for every pair.
EvalReport cross_eval(const std::vector<std::vector<double>>& samples,
                      const std::vector<int>& labels, const ParamGrid& grid, int repeats,
                      double split, std::uint64_t seed, const TrainOptions& options = {},
                      EvalTimings* timings = nullptr);

// ---- persistence -----------------------------------------------------------

void write_model(std::ostream& out, const SvmModel& model);
SvmModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace smokedet
