// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "nerkit/distrib.hpp"
#include "nerkit/features.hpp"
#include "nerkit/learner.hpp"

using namespace nerkit;

namespace {

struct CrfData {
  std::size_t labels = 21, features = 5000;
  std::vector<Instance> instances;
  std::vector<double> w;

  CrfData() {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 0.1);
    for (int i = 0; i < 2000; ++i) {
      Instance x;
      const std::size_t T = 8 + rng() % 20;
      for (std::size_t t = 0; t < T; ++t) {
        for (int k = 0; k < 30; ++k) {
          x.ids.push_back(static_cast<std::uint32_t>(rng() % features));
          x.values.push_back(1.0);
        }
        x.offsets.push_back(static_cast<std::uint32_t>(x.ids.size()));
        x.labels.push_back(rng() % 4 == 0 ? rng() % labels : 0);
      }
      instances.push_back(std::move(x));
    }
    w.resize(parameter_count(labels, features));
    for (auto& v : w) v = g(rng);
  }
};

const CrfData& crf_data() {
  static const CrfData d;
  return d;
}

TokenCorpus brown_corpus() {
  std::mt19937_64 rng(2);
  TokenCorpus c(3000);
  for (auto& s : c) {
    s.resize(5 + rng() % 15);
    for (auto& w : s) w = "w" + std::to_string(std::min(rng() % 600, rng() % 600));
  }
  return c;
}

std::vector<Sentence> sentences() {
  std::mt19937_64 rng(3);
  std::vector<Sentence> out(2000);
  for (auto& s : out) {
    const std::size_t n = 5 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) s.tokens.push_back({"Tok" + std::to_string(rng() % 3000), std::nullopt});
  }
  return out;
}

FeatureConfig lexical() {
  FeatureConfig c;
  c.use_clusters = c.use_term_freq = c.use_gazetteers = false;
  return c;
}

}  // namespace

static void BM_CrfObjectiveParallel(benchmark::State& state) {
  const auto& d = crf_data();
  const CrfObjective obj(d.instances, d.labels, d.features, 10.0);
  std::vector<double> g(d.w.size());
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(d.w, g));
}
BENCHMARK(BM_CrfObjectiveParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_CrfObjectiveSerial(benchmark::State& state) {
  const auto& d = crf_data();
  const CrfObjective obj(d.instances, d.labels, d.features, 10.0);
  std::vector<double> g(d.w.size());
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate_serial(d.w, g));
}
BENCHMARK(BM_CrfObjectiveSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_Brown(benchmark::State& state) {
  const auto corpus = brown_corpus();
  ClusterConfig cfg;
  cfg.num_classes = static_cast<std::size_t>(state.range(1));
  const auto kernel = state.range(0) ? BrownKernel::incremental : BrownKernel::reference;
  for (auto _ : state) benchmark::DoNotOptimize(train_brown(corpus, cfg, nullptr, kernel));
  state.SetLabel(state.range(0) ? "incremental" : "reference");
}
BENCHMARK(BM_Brown)->Args({1, 40})->Args({0, 40})->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_ExtractCorpus(benchmark::State& state) {
  const auto s = sentences();
  const auto cfg = lexical();
  for (auto _ : state) benchmark::DoNotOptimize(extract_corpus(s, {}, cfg, false));
}
BENCHMARK(BM_ExtractCorpus)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_ExtractSerial(benchmark::State& state) {
  const auto s = sentences();
  const auto cfg = lexical();
  for (auto _ : state) {
    std::vector<std::vector<FeatureVector>> out;
    out.reserve(s.size());
    for (const auto& x : s) out.push_back(extract(x, {}, cfg));
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_ExtractSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
