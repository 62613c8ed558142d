#include "smokedet/svm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "smokedet/error.hpp"

namespace smokedet {

void FeatureScaler::apply(std::span<double> x) const {
  for (std::size_t d = 0; d < mean.size() && d < x.size(); ++d) x[d] = (x[d] - mean[d]) * inv_std[d];
}

FeatureScaler FeatureScaler::fit(const std::vector<std::vector<double>>& samples,
                                 std::size_t dims) {
  FeatureScaler s;
  if (dims == 0 || samples.empty()) return s;
  s.mean.assign(dims, 0.0);
  s.inv_std.assign(dims, 1.0);
  const double n = static_cast<double>(samples.size());
  for (const auto& x : samples) {
    for (std::size_t d = 0; d < dims; ++d) s.mean[d] += x[d];
  }
  for (auto& m : s.mean) m /= n;
  std::vector<double> var(dims, 0.0);
  for (const auto& x : samples) {
    for (std::size_t d = 0; d < dims; ++d) var[d] += (x[d] - s.mean[d]) * (x[d] - s.mean[d]);
  }
  for (std::size_t d = 0; d < dims; ++d) {
    const double sd = std::sqrt(var[d] / n);
    s.inv_std[d] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

namespace {

constexpr double kTau = 1e-12;
constexpr std::size_t kMaxDenseGram = 6000;

// Gram matrix, dense when it fits, otherwise rows computed on request.
class GramRows {
 public:
  GramRows(const std::vector<double>& x, std::size_t n, std::size_t dim, double gamma)
      : x_(x), n_(n), dim_(dim), gamma_(gamma), dense_(n <= kMaxDenseGram) {
    diag_.assign(n, 1.0);  // exp(0)
    if (dense_) {
      k_.resize(n * n);
      for (std::size_t i = 0; i < n; ++i) {
        k_[i * n + i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) k_[i * n + j] = k_[j * n + i] = eval(i, j);
      }
    } else {
      scratch_[0].resize(n);
      scratch_[1].resize(n);
    }
  }

  // `slot` picks one of two scratch rows when not dense.
  const double* row(std::size_t i, int slot) {
    if (dense_) return &k_[i * n_];
    auto& r = scratch_[slot];
    for (std::size_t j = 0; j < n_; ++j) r[j] = i == j ? 1.0 : eval(i, j);
    return r.data();
  }
  double diag(std::size_t i) const { return diag_[i]; }

 private:
  double eval(std::size_t i, std::size_t j) const {
    return rbf_kernel({&x_[i * dim_], dim_}, {&x_[j * dim_], dim_}, gamma_);
  }

  const std::vector<double>& x_;
  std::size_t n_, dim_;
  double gamma_;
  bool dense_;
  std::vector<double> k_;
  std::vector<double> diag_;
  std::vector<double> scratch_[2];
};

}  // namespace

SvmModel train_svm(const std::vector<std::vector<double>>& samples, const std::vector<int>& labels,
                   double C, double gamma, const TrainOptions& options, TrainStats* stats) {
  const std::size_t n = samples.size();
  if (n == 0 || labels.size() != n) throw ContractError("train_svm: samples and labels differ");
  if (!(C > 0.0) || !(gamma > 0.0)) throw ContractError("train_svm: C and gamma must be > 0");
  const std::size_t dim = samples.front().size();
  if (dim == 0) throw ContractError("train_svm: empty feature vectors");
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (samples[i].size() != dim) throw ContractError("train_svm: ragged feature vectors");
    for (double v : samples[i]) {
      if (!std::isfinite(v)) throw ContractError("train_svm: non-finite feature value");
    }
    if (labels[i] == kSmoke) {
      has_pos = true;
    } else if (labels[i] == kNonSmoke) {
      has_neg = true;
    } else {
      throw ContractError("train_svm: labels must be +1 or -1");
    }
  }
  if (!has_pos || !has_neg) throw ContractError("train_svm: both classes are required");
  if (options.zscore_dims > dim) throw ContractError("train_svm: zscore_dims exceeds dimension");

  SvmModel model;
  model.gamma = gamma;
  model.C = C;
  model.feature_dim = dim;
  model.scaler = FeatureScaler::fit(samples, options.zscore_dims);

  std::vector<double> x(n * dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(samples[i].begin(), samples[i].end(), x.begin() + static_cast<std::ptrdiff_t>(i * dim));
    model.scaler.apply({&x[i * dim], dim});
  }

  // Dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q_ij = y_i y_j K_ij.
  // Pairs are chosen by maximal violation with second-order selection of
  // the partner; G holds the gradient Qa - e.
  GramRows gram(x, n, dim, gamma);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i];
  std::vector<double> alpha(n, 0.0);
  std::vector<double> G(n, -1.0);

  auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };
  auto objective = [&] {
    double f = 0.0;
    for (std::size_t t = 0; t < n; ++t) f += alpha[t] * (G[t] - 1.0);
    return 0.5 * f;
  };

  TrainStats st;
  double sweep_start_obj = 0.0;
  int idle_sweeps = 0;
  while (st.iterations < options.max_iterations) {
    std::ptrdiff_t i = -1;
    double gmax = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] >= gmax) {
        gmax = -y[t] * G[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0) break;
    const double* Ki = gram.row(static_cast<std::size_t>(i), 0);
    std::ptrdiff_t j = -1;
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double v = -y[t] * G[t];
      gmin = std::min(gmin, v);
      const double b = gmax - v;
      if (b > 0.0) {
        const double a = std::max(gram.diag(static_cast<std::size_t>(i)) + gram.diag(t) - 2.0 * Ki[t], kTau);
        const double score = -(b * b) / a;
        if (score <= best) {
          best = score;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    st.kkt_gap = gmax - gmin;
    if (j < 0 || st.kkt_gap < options.tol) {
      st.converged = true;
      break;
    }
    const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
    const double* Kj = gram.row(uj, 1);
    const double old_i = alpha[ui], old_j = alpha[uj];
    const double quad = std::max(gram.diag(ui) + gram.diag(uj) - 2.0 * Ki[uj], kTau);

    if (y[ui] != y[uj]) {
      const double delta = (-G[ui] - G[uj]) / quad;
      const double diff = alpha[ui] - alpha[uj];
      alpha[ui] += delta;
      alpha[uj] += delta;
      if (diff > 0) {
        if (alpha[uj] < 0) { alpha[uj] = 0; alpha[ui] = diff; }
      } else {
        if (alpha[ui] < 0) { alpha[ui] = 0; alpha[uj] = -diff; }
      }
      if (diff > 0) {
        if (alpha[ui] > C) { alpha[ui] = C; alpha[uj] = C - diff; }
      } else {
        if (alpha[uj] > C) { alpha[uj] = C; alpha[ui] = C + diff; }
      }
    } else {
      const double delta = (G[ui] - G[uj]) / quad;
      const double sum = alpha[ui] + alpha[uj];
      alpha[ui] -= delta;
      alpha[uj] += delta;
      if (sum > C) {
        if (alpha[ui] > C) { alpha[ui] = C; alpha[uj] = sum - C; }
        if (alpha[uj] > C) { alpha[uj] = C; alpha[ui] = sum - C; }
      } else {
        if (alpha[uj] < 0) { alpha[uj] = 0; alpha[ui] = sum; }
        if (alpha[ui] < 0) { alpha[ui] = 0; alpha[uj] = sum; }
      }
    }
    const double dai = alpha[ui] - old_i, daj = alpha[uj] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[ui] * Ki[t] * dai + y[uj] * Kj[t] * daj);
    }

    ++st.iterations;
    if (st.iterations % static_cast<std::int64_t>(n) == 0) {
      const double obj = objective();
      if (sweep_start_obj - obj <= 1e-12 * std::max(1.0, std::abs(obj))) {
        if (++idle_sweeps >= options.max_passes) break;
      } else {
        idle_sweeps = 0;
      }
      sweep_start_obj = obj;
    }
  }

  // Offset from free multipliers, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
  model.bias = -rho;

  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    model.coef.push_back(alpha[t] * y[t]);
    model.support.insert(model.support.end(), x.begin() + static_cast<std::ptrdiff_t>(t * dim),
                         x.begin() + static_cast<std::ptrdiff_t>((t + 1) * dim));
  }
  if (stats) *stats = st;
  return model;
}

Prediction predict(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.feature_dim) {
    throw ContractError("predict: feature dimension " + std::to_string(x.size()) +
                        " does not match model dimension " + std::to_string(model.feature_dim));
  }
  std::vector<double> scaled;
  std::span<const double> q = x;
  if (!model.scaler.empty()) {
    scaled.assign(x.begin(), x.end());
    model.scaler.apply(scaled);
    q = scaled;
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_count(); ++i) {
    f += model.coef[i] * rbf_kernel(model.support_vector(i), q, model.gamma);
  }
  return {f >= 0.0 ? kSmoke : kNonSmoke, f};
}

// ---- parameter search ------------------------------------------------------

ParamGrid ParamGrid::defaults() {
  return {{{2, 100}, {0.001, 1}, {50, 1000}, {0.5, 1000}, {0.02, 1000}}};
}

ParamGrid ParamGrid::swapped() const {
  ParamGrid g;
  for (const auto& p : pairs) g.pairs.push_back({p.gamma, p.C});
  return g;
}

void ParamGrid::validate() const {
  if (pairs.empty()) throw ConfigError("parameter grid is empty");
  for (const auto& p : pairs) {
    if (!(p.C > 0.0) || !(p.gamma > 0.0)) throw ConfigError("grid entries need C > 0, gamma > 0");
  }
}

namespace {

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

Split stratified_split(const std::vector<std::size_t>& pos, const std::vector<std::size_t>& neg,
                       double split, std::mt19937_64& rng) {
  Split s;
  for (const auto* cls : {&pos, &neg}) {
    std::vector<std::size_t> idx = *cls;
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n = static_cast<std::ptrdiff_t>(idx.size());
    const auto k = std::clamp<std::ptrdiff_t>(std::llround(split * static_cast<double>(n)), 1, n - 1);
    s.train.insert(s.train.end(), idx.begin(), idx.begin() + k);
    s.test.insert(s.test.end(), idx.begin() + k, idx.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

}  // namespace

EvalReport cross_eval(const std::vector<std::vector<double>>& samples,
                      const std::vector<int>& labels, const ParamGrid& grid, int repeats,
                      double split, std::uint64_t seed, const TrainOptions& options,
                      EvalTimings* timings) {
  grid.validate();
  if (repeats < 1) throw ContractError("cross_eval: repeats must be >= 1");
  if (!(split > 0.0 && split < 1.0)) throw ContractError("cross_eval: split must lie in (0, 1)");
  if (samples.size() != labels.size()) throw ContractError("cross_eval: samples and labels differ");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == kSmoke ? pos : neg).push_back(i);
  if (pos.size() < 2 || neg.size() < 2) {
    throw ContractError("cross_eval: each class needs at least two samples");
  }

  std::vector<Split> splits;
  for (int r = 0; r < repeats; ++r) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    splits.push_back(stratified_split(pos, neg, split, rng));
  }

  using Clock = std::chrono::steady_clock;
  EvalReport report;
  if (timings) *timings = {};
  for (const auto& pair : grid.pairs) {
    PairResult res{pair, {}, 0.0};
    double train_s = 0.0, recog_s = 0.0;
    for (const auto& s : splits) {
      std::vector<std::vector<double>> tx;
      std::vector<int> ty;
      for (auto i : s.train) {
        tx.push_back(samples[i]);
        ty.push_back(labels[i]);
      }
      const auto t0 = Clock::now();
      const SvmModel m = train_svm(tx, ty, pair.C, pair.gamma, options);
      const auto t1 = Clock::now();
      ++report.training_runs;
      std::size_t correct = 0;
      for (auto i : s.test) correct += predict(m, samples[i]).label == labels[i];
      const auto t2 = Clock::now();
      train_s += std::chrono::duration<double>(t1 - t0).count();
      recog_s += std::chrono::duration<double>(t2 - t1).count();
      res.accuracies.push_back(static_cast<double>(correct) / static_cast<double>(s.test.size()));
    }
    res.mean_accuracy = std::accumulate(res.accuracies.begin(), res.accuracies.end(), 0.0) /
                        static_cast<double>(repeats);
    if (report.pairs.empty() || res.mean_accuracy > report.best_mean_accuracy) {
      report.best = report.pairs.size();
      report.best_mean_accuracy = res.mean_accuracy;
    }
    report.pairs.push_back(std::move(res));
    if (timings) {
      timings->mean_train_seconds.push_back(train_s / repeats);
      timings->mean_recognize_seconds.push_back(recog_s / repeats);
    }
  }
  return report;
}

// ---- persistence -----------------------------------------------------------
//
// Text format, one record per line (see docs/model_format.md):
//   smokedet-svm 1
//   layout <tag or ->
//   kernel rbf <gamma>
//   C <value>
//   bias <value>
//   feature_dim <d>
//   scaler <k> followed by two lines of k values (mean, inv_std) when k > 0
//   support_vectors <n> followed by n lines: coef v_1 ... v_d

namespace {

void write_values(std::ostream& out, std::span<const double> v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i];
  out << '\n';
}

template <class T>
T expect_field(std::istream& in, const std::string& key) {
  std::string got;
  T value{};
  if (!(in >> got) || got != key || !(in >> value)) {
    throw FormatError("model file: expected field '" + key + "'");
  }
  return value;
}

std::vector<double> read_values(std::istream& in, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) {
    if (!(in >> x)) throw FormatError("model file: truncated value list");
  }
  return v;
}

}  // namespace

void write_model(std::ostream& out, const SvmModel& model) {
  out << std::setprecision(17);
  out << "smokedet-svm 1\n";
  out << "layout " << (model.layout.empty() ? "-" : model.layout) << '\n';
  out << "kernel rbf " << model.gamma << '\n';
  out << "C " << model.C << '\n';
  out << "bias " << model.bias << '\n';
  out << "feature_dim " << model.feature_dim << '\n';
  out << "scaler " << model.scaler.mean.size() << '\n';
  if (!model.scaler.empty()) {
    write_values(out, model.scaler.mean);
    write_values(out, model.scaler.inv_std);
  }
  out << "support_vectors " << model.support_count() << '\n';
  for (std::size_t i = 0; i < model.support_count(); ++i) {
    out << model.coef[i];
    for (double v : model.support_vector(i)) out << ' ' << v;
    out << '\n';
  }
}

SvmModel read_model(std::istream& in) {
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != "smokedet-svm") {
    throw FormatError("not a smokedet SVM model");
  }
  if (version != 1) throw FormatError("unsupported model version " + std::to_string(version));
  SvmModel m;
  m.layout = expect_field<std::string>(in, "layout");
  if (m.layout == "-") m.layout.clear();
  std::string kind;
  if (!(in >> kind) || kind != "kernel" || !(in >> kind) || kind != "rbf" || !(in >> m.gamma)) {
    throw FormatError("model file: expected 'kernel rbf <gamma>'");
  }
  m.C = expect_field<double>(in, "C");
  m.bias = expect_field<double>(in, "bias");
  m.feature_dim = expect_field<std::size_t>(in, "feature_dim");
  const auto k = expect_field<std::size_t>(in, "scaler");
  if (k > m.feature_dim) throw FormatError("model file: scaler longer than feature_dim");
  if (k > 0) {
    m.scaler.mean = read_values(in, k);
    m.scaler.inv_std = read_values(in, k);
  }
  const auto n = expect_field<std::size_t>(in, "support_vectors");
  m.coef.reserve(n);
  m.support.reserve(n * m.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    double c = 0.0;
    if (!(in >> c)) throw FormatError("model file: truncated support vectors");
    m.coef.push_back(c);
    auto v = read_values(in, m.feature_dim);
    m.support.insert(m.support.end(), v.begin(), v.end());
  }
  return m;
}

void save_model(const std::filesystem::path& path, const SvmModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_model(out, model);
  if (!out) throw IoError("write failed for " + path.string());
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_model(in);
}

}  // namespace smokedet
