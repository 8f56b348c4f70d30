#include <doctest.h>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "nerkit/learner.hpp"
#include "nerkit/lbfgs.hpp"
#include "oracles.hpp"

using namespace nerkit;

namespace {

std::vector<Instance> random_instances(std::mt19937_64& rng, std::size_t n, std::size_t L, std::size_t F) {
  std::vector<Instance> data;
  for (std::size_t i = 0; i < n; ++i) data.push_back(oracle::random_instance(rng, 1 + rng() % 4, L, F, 2));
  return data;
}

double training_accuracy(const SequenceModel& m, const std::vector<LabeledSequence>& data) {
  std::size_t right = 0, total = 0;
  for (const auto& seq : data) {
    const auto pred = decode(m, seq.features);
    for (std::size_t t = 0; t < pred.size(); ++t) right += pred[t] == seq.labels[t];
    total += pred.size();
  }
  return static_cast<double>(right) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("CRF gradient matches finite differences") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t L = 2 + rng() % 2, F = 3;
    const auto data = random_instances(rng, 5, L, F);
    const auto w = oracle::random_weights(rng, parameter_count(L, F), 0.5);
    const CrfObjective obj(data, L, F, 2.0);
    std::vector<double> g(w.size());
    const double f = obj.evaluate(w, g);
    CHECK(f == doctest::Approx(oracle::objective(w, L, data, 2.0)).epsilon(1e-10));
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double h = 1e-5;
      auto wp = w, wm = w;
      wp[k] += h;
      wm[k] -= h;
      const double fd = (oracle::objective(wp, L, data, 2.0) - oracle::objective(wm, L, data, 2.0)) / (2 * h);
      CHECK(std::abs(fd - g[k]) / std::max(1.0, std::abs(fd) + std::abs(g[k])) < 1e-6);
    }
  }
}

TEST_CASE("parallel and serial objectives agree") {
  std::mt19937_64 rng(103);
  const std::size_t L = 5, F = 40;
  const auto data = random_instances(rng, 300, L, F);
  const auto w = oracle::random_weights(rng, parameter_count(L, F));
  const CrfObjective obj(data, L, F, 10.0);
  std::vector<double> g1(w.size()), g2(w.size());
  const double a = obj.evaluate(w, g1);
  const double b = obj.evaluate_serial(w, g2);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(g1[k] == doctest::Approx(g2[k]).epsilon(1e-10).scale(1.0));

  // Same bits for any thread count.
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 3, 8}) {
    omp_set_num_threads(threads);
    std::vector<double> g3(w.size());
    CHECK(obj.evaluate(w, g3) == a);
    CHECK(g3 == g1);
  }
  omp_set_num_threads(saved);
}

TEST_CASE("objective at zero weights is -sum T log L") {
  std::mt19937_64 rng(107);
  const std::size_t L = 3, F = 4;
  const auto data = random_instances(rng, 12, L, F);
  std::vector<double> w(parameter_count(L, F), 0.0), g(w.size());
  double expect = 0.0;
  for (const auto& x : data) expect -= static_cast<double>(x.length()) * std::log(static_cast<double>(L));
  CHECK(crf_objective_and_gradient(data, WeightView{w, L}, F, 10.0, g) == doctest::Approx(expect));
}

TEST_CASE("objective rejects malformed data") {
  Instance x;
  x.ids = {0};
  x.values = {1.0};
  x.offsets = {0, 1};
  CHECK_THROWS_AS(CrfObjective({x}, 3, 1, 1.0), std::invalid_argument);
  x.labels = {3};
  CHECK_THROWS_AS(CrfObjective({x}, 3, 1, 1.0), std::invalid_argument);
  x.labels = {0};
  CHECK_THROWS_AS(CrfObjective({x}, 3, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(CrfObjective({x}, 3, 1, 0.0), std::invalid_argument);
  CHECK_NOTHROW(CrfObjective({x}, 3, 1, 1.0));
}

TEST_CASE("L-BFGS minimises a quadratic") {
  // f(x) = sum_i (i+1) (x_i - i)^2
  auto f = [](std::span<const double> x, std::span<double> g) {
    double v = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - static_cast<double>(i);
      v += static_cast<double>(i + 1) * d * d;
      g[i] = 2.0 * static_cast<double>(i + 1) * d;
    }
    return v;
  };
  LbfgsOptions opts;
  opts.grad_tolerance = 1e-9;
  const auto r = lbfgs_minimize(f, std::vector<double>(6, 0.0), opts);
  CHECK(r.converged);
  for (std::size_t i = 0; i < 6; ++i) CHECK(r.x[i] == doctest::Approx(static_cast<double>(i)).epsilon(1e-6));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("CRF training is monotone, deterministic and fits a small corpus") {
  const auto data = fixture::labeled(fixture::tiny_corpus());
  REQUIRE(data.size() == 20);
  LearnerConfig cfg;
  TrainReport r1, r2;
  const auto m1 = train_crf_lbfgs(LabelScheme::wnut(), data, cfg, &r1);
  CHECK(r1.iterations <= 200);
  CHECK_FALSE(r1.line_search_failed);
  for (std::size_t i = 1; i < r1.history.size(); ++i) CHECK(r1.history[i] >= r1.history[i - 1]);
  CHECK(r1.objective == r1.history.back());
  CHECK(training_accuracy(m1, data) == 1.0);

  omp_set_num_threads(1);
  const auto m2 = train_crf_lbfgs(LabelScheme::wnut(), data, cfg, &r2);
  omp_set_num_threads(omp_get_num_procs());
  CHECK(r2.history == r1.history);
  CHECK(std::equal(m1.parameters().begin(), m1.parameters().end(), m2.parameters().begin(), m2.parameters().end()));
}

TEST_CASE("perceptron reaches zero mistakes and stops") {
  const auto data = fixture::labeled(fixture::tiny_corpus());
  LearnerConfig cfg;
  TrainReport r;
  const auto m = train_perceptron(LabelScheme::wnut(), data, cfg, &r);
  REQUIRE_FALSE(r.mistakes.empty());
  CHECK(r.mistakes.back() == 0);
  CHECK(r.mistakes.size() <= 10);
  CHECK(r.iterations == r.mistakes.size());
  for (std::size_t e = 0; e + 1 < r.mistakes.size(); ++e) CHECK(r.mistakes[e] > 0);
  CHECK(training_accuracy(m, data) == 1.0);
}

TEST_CASE("perceptron returns the mean over instance visits") {
  // Oracle: plain perceptron that stores the weight vector after every
  // visit and averages them at the end.
  std::vector<LabeledSequence> data(3);
  auto tok = [](const std::string& w) {
    FeatureVector fv;
    fv.add("w=" + w);
    fv.add("bias");
    return fv;
  };
  data[0] = {{tok("Paris"), tok("is")}, {"B-geo-loc", "O"}};
  data[1] = {{tok("is"), tok("Paris")}, {"O", "B-geo-loc"}};
  data[2] = {{tok("Nokia"), tok("Paris")}, {"B-company", "B-geo-loc"}};
  const LabelScheme scheme({"company", "geo-loc"});
  LearnerConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 9;
  TrainReport report;
  const auto model = train_perceptron(scheme, data, cfg, &report);

  std::vector<Instance> inst;
  const auto dict = build_dictionary(scheme, LearnerKind::perceptron, data, inst);
  const auto L = scheme.num_labels();
  std::vector<double> w(dict.parameters().size(), 0.0), sum(w.size(), 0.0);
  std::size_t visits = 0, epochs_run = 0;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::size_t mistakes = 0;
    for (auto i : epoch_order(inst.size(), cfg.seed, e)) {
      const auto pred = viterbi(WeightView{w, L}, inst[i], scheme);
      if (pred != inst[i].labels) {
        ++mistakes;
        for (std::size_t t = 0; t < pred.size(); ++t) {
          const std::size_t from_g = t == 0 ? L : inst[i].labels[t - 1];
          const std::size_t from_p = t == 0 ? L : pred[t - 1];
          w[oracle::trans_idx(L, from_g, inst[i].labels[t])] += 1.0;
          w[oracle::trans_idx(L, from_p, pred[t])] -= 1.0;
          for (auto k = inst[i].offsets[t]; k < inst[i].offsets[t + 1]; ++k) {
            w[oracle::emit_idx(L, inst[i].ids[k], inst[i].labels[t])] += inst[i].values[k];
            w[oracle::emit_idx(L, inst[i].ids[k], pred[t])] -= inst[i].values[k];
          }
        }
      }
      for (std::size_t k = 0; k < w.size(); ++k) sum[k] += w[k];
      ++visits;
    }
    ++epochs_run;
    if (mistakes == 0) break;
  }
  CHECK(report.mistakes.size() == epochs_run);
  const auto p = model.parameters();
  for (std::size_t k = 0; k < w.size(); ++k)
    CHECK(p[k] == doctest::Approx(sum[k] / static_cast<double>(visits)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("passive-aggressive step") {
  std::mt19937_64 rng(109);
  const LabelScheme scheme({"a", "b"});
  const std::size_t L = scheme.num_labels(), F = 6;
  std::size_t updates = 0, passive = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto x = oracle::random_instance(rng, 1 + rng() % 4, L, F, 2);
    auto w = oracle::random_weights(rng, parameter_count(L, F), 0.3);
    const double c = trial % 2 ? 0.05 : 10.0;
    const auto before = w;
    const auto u = pa_step(w, L, scheme, x, c);
    CHECK(u.tau <= c);
    CHECK(u.tau >= 0.0);
    if (!u.updated) {
      CHECK(w == before);
      CHECK(u.loss <= 0.0);
      ++passive;
      continue;
    }
    ++updates;
    CHECK(u.loss > 0.0);
    CHECK(u.tau == doctest::Approx(std::min(c, u.loss / u.sq_norm)));
    // The margin violation against the same prediction shrinks, and is
    // closed exactly when tau is not clipped.
    const WeightView after{w, L};
    const double new_loss = score_sequence(after, x, u.predicted) - score_sequence(after, x, x.labels) +
                            static_cast<double>(hamming(u.predicted, x.labels));
    CHECK(new_loss < u.loss);
    if (u.tau < c) CHECK(std::abs(new_loss) < 1e-9);
  }
  CHECK(updates > 50);

  // An instance that already wins by the required margin is left alone.
  Instance x;
  x.ids = {0};
  x.values = {1.0};
  x.offsets = {0, 1};
  x.labels = {1};
  std::vector<double> w(parameter_count(L, 1), 0.0);
  w[oracle::emit_idx(L, 0, 1)] = 5.0;
  const auto before = w;
  const auto u = pa_step(w, L, scheme, x, 1.0);
  CHECK_FALSE(u.updated);
  CHECK(w == before);
  CHECK(passive + updates == 300);
}

TEST_CASE("PA training averages end-of-epoch weights") {
  const auto data = fixture::labeled(fixture::tiny_corpus());
  LearnerConfig cfg;
  cfg.epochs = 5;
  TrainReport report;
  std::size_t observed = 0;
  const auto m = train_pa(LabelScheme::wnut(), data, cfg, &report, [&](const PaUpdate& u) {
    ++observed;
    CHECK(u.tau <= cfg.pa_c);
  });
  CHECK(observed == 5 * data.size());
  CHECK(report.mistakes.size() == 5);
  CHECK(report.skipped == 0);
  CHECK(training_accuracy(m, data) >= 0.95);

  TrainReport again;
  const auto m2 = train_pa(LabelScheme::wnut(), data, cfg, &again);
  CHECK(same_weights(m, m2));
}

TEST_CASE("epoch order") {
  const auto a = epoch_order(20, 1, 0);
  CHECK(a == epoch_order(20, 1, 0));
  CHECK(a != epoch_order(20, 1, 1));
  CHECK(a != epoch_order(20, 2, 0));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(20);
  std::iota(iota.begin(), iota.end(), 0);
  CHECK(sorted == iota);
  CHECK(epoch_order(0, 1, 0).empty());
}

TEST_CASE("learner config validation") {
  LearnerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.l2_sigma2 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.pa_c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK_THROWS_AS(train(LearnerKind::perceptron, LabelScheme::wnut(), {}, LearnerConfig{}), std::invalid_argument);
}
