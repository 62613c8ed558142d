#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles/qp_oracle.hpp"
#include "smokedet/error.hpp"
#include "smokedet/svm.hpp"
#include "support.hpp"

using namespace smokedet;

namespace {

struct Data {
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

Data two_clusters(int per_class, double spread, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, spread);
  Data d;
  for (int i = 0; i < per_class; ++i) {
    d.x.push_back({1.0 + n(rng), 1.0 + n(rng)});
    d.y.push_back(kSmoke);
    d.x.push_back({-1.0 + n(rng), -1.0 + n(rng)});
    d.y.push_back(kNonSmoke);
  }
  return d;
}

Data noisy_xor(int per_quadrant, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 0.35);
  Data d;
  for (int i = 0; i < per_quadrant; ++i) {
    for (int q = 0; q < 4; ++q) {
      const double sx = (q & 1) ? 1.0 : -1.0, sy = (q & 2) ? 1.0 : -1.0;
      d.x.push_back({sx + n(rng), sy + n(rng)});
      d.y.push_back(sx * sy > 0 ? kSmoke : kNonSmoke);
    }
  }
  return d;
}

double accuracy(const SvmModel& m, const Data& d) {
  int ok = 0;
  for (std::size_t i = 0; i < d.x.size(); ++i) ok += predict(m, d.x[i]).label == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(d.x.size());
}

// Dual objective 1/2 a'Qa - sum a, evaluated from a model's coefficients.
double dual_objective(const SvmModel& m) {
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < m.support_count(); ++i) {
    lin += std::abs(m.coef[i]);
    for (std::size_t j = 0; j < m.support_count(); ++j) {
      quad += m.coef[i] * m.coef[j] * rbf_kernel(m.support_vector(i), m.support_vector(j), m.gamma);
    }
  }
  return 0.5 * quad - lin;
}

double oracle_objective(const oracle::QpSolution& s) {
  double quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    const double ai = s.alpha[static_cast<Eigen::Index>(i)];
    lin += ai;
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      quad += ai * s.alpha[static_cast<Eigen::Index>(j)] * s.y[i] * s.y[j] *
              rbf_kernel(s.x[i], s.x[j], s.gamma);
    }
  }
  return 0.5 * quad - lin;
}

}  // namespace

TEST_CASE("rbf kernel") {
  const std::vector<double> a = {0, 0}, b = {3, 4};
  CHECK(rbf_kernel(a, a, 5.0) == 1.0);
  CHECK(rbf_kernel(a, b, 0.1) == doctest::Approx(std::exp(-2.5)));
}

TEST_CASE("separable clusters are learned perfectly") {
  std::mt19937_64 rng(1);
  const Data train = two_clusters(40, 0.2, rng);
  const Data test = two_clusters(40, 0.2, rng);
  TrainStats st;
  const SvmModel m = train_svm(train.x, train.y, 10.0, 0.5, {}, &st);
  CHECK(st.converged);
  CHECK(accuracy(m, train) == 1.0);
  CHECK(accuracy(m, test) == 1.0);
  CHECK(m.support_count() < train.x.size());
}

TEST_CASE("SMO agrees with an interior-point QP oracle") {
  std::mt19937_64 rng(2);
  TrainOptions tight;
  tight.tol = 1e-6;
  for (const auto& [C, gamma] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {10.0, 2.0}, {0.3, 0.5}}) {
    CAPTURE(C);
    CAPTURE(gamma);
    const Data d = noisy_xor(8, rng);
    const SvmModel m = train_svm(d.x, d.y, C, gamma, tight);
    const oracle::QpSolution ref = oracle::solve_svm_dual(d.x, d.y, C, gamma);
    CHECK(dual_objective(m) == doctest::Approx(oracle_objective(ref)).epsilon(1e-5));
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 50; ++t) {
      const std::vector<double> z = {u(rng), u(rng)};
      CHECK(predict(m, z).margin == doctest::Approx(ref.decision(z)).epsilon(1e-3).scale(1.0));
    }
  }
}

TEST_CASE("trained multipliers satisfy the box and equality constraints") {
  std::mt19937_64 rng(3);
  const Data d = noisy_xor(15, rng);
  for (double C : {0.1, 1.0, 100.0}) {
    const SvmModel m = train_svm(d.x, d.y, C, 1.0);
    double sum = 0.0;
    for (double c : m.coef) {
      CHECK(std::abs(c) > 0.0);
      CHECK(std::abs(c) <= C * (1 + 1e-12));
      sum += c;
    }
    CHECK(std::abs(sum) <= 1e-9 * std::max(1.0, C));
  }
}

TEST_CASE("predict margin is the explicit kernel expansion") {
  std::mt19937_64 rng(4);
  const Data d = noisy_xor(10, rng);
  const SvmModel m = train_svm(d.x, d.y, 5.0, 1.5);
  for (const auto& z : d.x) {
    double f = m.bias;
    for (std::size_t i = 0; i < m.support_count(); ++i) {
      double d2 = 0;
      for (std::size_t k = 0; k < 2; ++k) d2 += std::pow(m.support_vector(i)[k] - z[k], 2);
      f += m.coef[i] * std::exp(-m.gamma * d2);
    }
    CHECK(predict(m, z).margin == doctest::Approx(f).epsilon(1e-12));
  }
}

TEST_CASE("zero margin predicts smoke") {
  SvmModel m;
  m.gamma = 1.0;
  m.feature_dim = 1;
  CHECK(predict(m, std::vector<double>{3.0}).label == kSmoke);
  m.bias = -1e-300;
  CHECK(predict(m, std::vector<double>{3.0}).label == kNonSmoke);
  CHECK_THROWS_AS(predict(m, std::vector<double>{1.0, 2.0}), ContractError);
}

TEST_CASE("duplicate samples with conflicting labels still train") {
  const std::vector<std::vector<double>> x = {{0, 0}, {0, 0}, {0, 0}, {1, 1}, {1, 1}};
  const std::vector<int> y = {kSmoke, kNonSmoke, kSmoke, kNonSmoke, kNonSmoke};
  TrainStats st;
  const SvmModel m = train_svm(x, y, 1.0, 1.0, {}, &st);
  CHECK(st.converged);
  for (double c : m.coef) CHECK(std::abs(c) <= 1.0 + 1e-12);
  CHECK(predict(m, x[3]).label == kNonSmoke);
}

TEST_CASE("training is invariant to sample order") {
  std::mt19937_64 rng(5);
  const Data d = noisy_xor(10, rng);
  std::vector<std::size_t> perm(d.x.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Data p;
  for (auto i : perm) {
    p.x.push_back(d.x[i]);
    p.y.push_back(d.y[i]);
  }
  TrainOptions tight;
  tight.tol = 1e-6;
  const SvmModel a = train_svm(d.x, d.y, 3.0, 1.0, tight);
  const SvmModel b = train_svm(p.x, p.y, 3.0, 1.0, tight);
  for (const auto& z : d.x) {
    CHECK(predict(a, z).margin == doctest::Approx(predict(b, z).margin).epsilon(1e-3).scale(1.0));
  }
}

TEST_CASE("z-scoring is fitted on the leading dimensions only") {
  std::mt19937_64 rng(6);
  Data d = two_clusters(20, 0.3, rng);
  for (auto& v : d.x) v[0] = 1000.0 + 50.0 * v[0];  // wildly scaled first feature
  TrainOptions opt;
  opt.zscore_dims = 1;
  const SvmModel m = train_svm(d.x, d.y, 10.0, 0.5, opt);
  REQUIRE(m.scaler.mean.size() == 1);
  double mean = 0;
  for (const auto& v : d.x) mean += v[0];
  CHECK(m.scaler.mean[0] == doctest::Approx(mean / d.x.size()));
  CHECK(accuracy(m, d) == 1.0);
  opt.zscore_dims = 3;
  CHECK_THROWS_AS(train_svm(d.x, d.y, 1, 1, opt), ContractError);
}

TEST_CASE("train_svm input errors") {
  const std::vector<std::vector<double>> x = {{0.0}, {1.0}};
  CHECK_THROWS_AS(train_svm(x, {kSmoke, kSmoke}, 1, 1), ContractError);
  CHECK_THROWS_AS(train_svm(x, {kSmoke, 0}, 1, 1), ContractError);
  CHECK_THROWS_AS(train_svm(x, {kSmoke}, 1, 1), ContractError);
  CHECK_THROWS_AS(train_svm(x, {kSmoke, kNonSmoke}, 0, 1), ContractError);
  CHECK_THROWS_AS(train_svm({{0.0}, {1.0, 2.0}}, {kSmoke, kNonSmoke}, 1, 1), ContractError);
  CHECK_THROWS_AS(train_svm({{0.0}, {std::nan("")}}, {kSmoke, kNonSmoke}, 1, 1), ContractError);
}

TEST_CASE("parameter grid") {
  const ParamGrid g = ParamGrid::defaults();
  REQUIRE(g.pairs.size() == 5);
  CHECK(g.pairs[0] == ParamPair{2, 100});
  CHECK(g.pairs[4] == ParamPair{0.02, 1000});
  CHECK(g.swapped().pairs[1] == ParamPair{1, 0.001});
  CHECK_THROWS_AS(ParamGrid{}.validate(), ConfigError);
  CHECK_THROWS_AS((ParamGrid{{{1, -1}}}.validate()), ConfigError);
}

TEST_CASE("cross_eval runs repeats x pairs trainings and is deterministic") {
  std::mt19937_64 rng(7);
  const Data d = two_clusters(20, 0.4, rng);
  const ParamGrid grid = ParamGrid::defaults();
  EvalTimings timings;
  const EvalReport r = cross_eval(d.x, d.y, grid, 10, 0.5, 42, {}, &timings);
  CHECK(r.training_runs == 50);
  REQUIRE(r.pairs.size() == 5);
  for (const auto& p : r.pairs) {
    CHECK(p.accuracies.size() == 10);
    for (double a : p.accuracies) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
    }
  }
  CHECK(r.best_mean_accuracy == r.pairs[r.best].mean_accuracy);
  for (const auto& p : r.pairs) CHECK(p.mean_accuracy <= r.best_mean_accuracy);
  CHECK(timings.mean_train_seconds.size() == 5);
  CHECK(cross_eval(d.x, d.y, grid, 10, 0.5, 42) == r);
  CHECK_FALSE(cross_eval(d.x, d.y, grid, 10, 0.5, 43) == r);
}

TEST_CASE("cross_eval argument checks") {
  std::mt19937_64 rng(8);
  const Data d = two_clusters(5, 0.4, rng);
  const ParamGrid g = ParamGrid::defaults();
  CHECK_THROWS_AS(cross_eval(d.x, d.y, g, 0, 0.5, 1), ContractError);
  CHECK_THROWS_AS(cross_eval(d.x, d.y, g, 1, 1.0, 1), ContractError);
  CHECK_THROWS_AS(cross_eval({{0.0}, {1.0}, {2.0}}, {kSmoke, kNonSmoke, kNonSmoke}, g, 1, 0.5, 1),
                  ContractError);
}

TEST_CASE("model text round trip") {
  std::mt19937_64 rng(9);
  const Data d = noisy_xor(6, rng);
  TrainOptions opt;
  opt.zscore_dims = 2;
  SvmModel m = train_svm(d.x, d.y, 2.0, 0.7, opt);
  m.layout = "TEXTURE:BGC3";
  std::stringstream buf;
  write_model(buf, m);
  const SvmModel back = read_model(buf);
  CHECK(back.layout == m.layout);
  CHECK(back.gamma == m.gamma);
  CHECK(back.C == m.C);
  CHECK(back.bias == m.bias);
  CHECK(back.coef == m.coef);
  CHECK(back.support == m.support);
  CHECK(back.scaler.mean == m.scaler.mean);
  CHECK(back.scaler.inv_std == m.scaler.inv_std);

  testing_support::TempDir dir("model");
  save_model(dir / "m.model", m);
  const SvmModel disk = load_model(dir / "m.model");
  for (const auto& z : d.x) CHECK(predict(disk, z).margin == predict(m, z).margin);
  CHECK_THROWS_AS(load_model(dir / "none.model"), IoError);
}

TEST_CASE("malformed model files") {
  for (const char* text : {"garbage 1\n", "smokedet-svm 2\n",
                           "smokedet-svm 1\nlayout -\nkernel linear 1\n",
                           "smokedet-svm 1\nlayout -\nkernel rbf 1\nC 1\nbias 0\nfeature_dim 2\nscaler 0\n"
                           "support_vectors 2\n1 0 0\n"}) {
    std::istringstream in(text);
    CHECK_THROWS_AS(read_model(in), FormatError);
  }
}
