#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "nerkit/learner.hpp"
#include "nerkit/log.hpp"

namespace nerkit {

std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  // mt19937_64 output is fully specified, unlike the standard distributions.
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (epoch + 1)));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

std::vector<std::pair<std::size_t, double>> feature_difference(
    std::size_t num_labels, const Instance& inst, const std::vector<std::size_t>& gold,
    const std::vector<std::size_t>& pred) {
  const WeightView layout{{}, num_labels};
  std::vector<std::pair<std::size_t, double>> raw;
  auto add_path = [&](const std::vector<std::size_t>& y, double sign) {
    for (std::size_t t = 0; t < inst.length(); ++t) {
      raw.emplace_back(t == 0 ? layout.transition_index(num_labels, y[0])
                              : layout.transition_index(y[t - 1], y[t]),
                       sign);
      for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k)
        raw.emplace_back(layout.emission_index(inst.ids[k], y[t]), sign * inst.values[k]);
    }
  };
  add_path(gold, 1.0);
  add_path(pred, -1.0);
  std::stable_sort(raw.begin(), raw.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<std::size_t, double>> out;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    double sum = 0.0, scale = 0.0;
    for (; j < raw.size() && raw[j].first == raw[i].first; ++j) {
      sum += raw[j].second;
      scale = std::max(scale, std::abs(raw[j].second));
    }
    if (std::abs(sum) > 1e-12 * scale) out.emplace_back(raw[i].first, sum);
    i = j;
  }
  return out;
}

PaUpdate pa_step(std::span<double> w, std::size_t num_labels, const LabelScheme& scheme,
                 const Instance& inst, double c) {
  const WeightView v{w, num_labels};
  const auto& gold = inst.labels;
  PaUpdate u;
  DecodeOptions opts;
  opts.cost_against = &gold;
  u.predicted = viterbi(v, inst, scheme, opts);
  if (u.predicted == gold) return u;

  u.loss = score_sequence(v, inst, u.predicted) - score_sequence(v, inst, gold) +
           static_cast<double>(hamming(u.predicted, gold));
  if (!(u.loss > 0.0)) return u;

  const auto diff = feature_difference(num_labels, inst, gold, u.predicted);
  for (const auto& [idx, val] : diff) u.sq_norm += val * val;
  if (u.sq_norm == 0.0) {
    u.skipped = true;
    warn("passive-aggressive: zero-norm feature difference with positive loss; instance skipped");
    return u;
  }
  u.tau = std::min(c, u.loss / u.sq_norm);
  for (const auto& [idx, val] : diff) w[idx] += u.tau * val;
  u.updated = true;
  return u;
}

SequenceModel train_pa(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                       const LearnerConfig& config, TrainReport* report,
                       const PaObserver& observer) {
  config.validate();
  std::vector<Instance> instances;
  SequenceModel model = build_dictionary(scheme, LearnerKind::crf_pa, data, instances);
  const auto L = model.num_labels();
  std::vector<double> w(model.parameters().size(), 0.0);
  std::vector<double> sum(w.size(), 0.0);
  TrainReport local;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::size_t mistakes = 0;
    for (auto i : epoch_order(instances.size(), config.seed, epoch)) {
      const auto u = pa_step(w, L, scheme, instances[i], config.pa_c);
      if (u.loss > 0.0) ++mistakes;
      if (u.updated) ++local.updates;
      if (u.skipped) ++local.skipped;
      if (observer) observer(u);
    }
    local.mistakes.push_back(mistakes);
    for (std::size_t k = 0; k < w.size(); ++k) sum[k] += w[k];
  }
  const double epochs = static_cast<double>(config.epochs);
  for (auto& s : sum) s /= epochs;
  model.set_parameters(std::move(sum));
  local.iterations = config.epochs;
  if (report) *report = std::move(local);
  return model;
}

SequenceModel train_perceptron(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                               const LearnerConfig& config, TrainReport* report) {
  config.validate();
  std::vector<Instance> instances;
  SequenceModel model = build_dictionary(scheme, LearnerKind::perceptron, data, instances);
  const auto L = model.num_labels();
  std::vector<double> w(model.parameters().size(), 0.0);
  // Lazy averaging: u accumulates (step - 1) * delta so that the mean of
  // the per-step weight vectors is w - u / steps.
  std::vector<double> u(w.size(), 0.0);
  std::size_t step = 0;
  TrainReport local;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::size_t mistakes = 0;
    for (auto i : epoch_order(instances.size(), config.seed, epoch)) {
      ++step;
      const auto& inst = instances[i];
      const auto pred = viterbi(WeightView{w, L}, inst, scheme);
      if (pred == inst.labels) continue;
      ++mistakes;
      ++local.updates;
      for (const auto& [idx, val] : feature_difference(L, inst, inst.labels, pred)) {
        w[idx] += val;
        u[idx] += static_cast<double>(step - 1) * val;
      }
    }
    local.mistakes.push_back(mistakes);
    local.iterations = epoch + 1;
    if (mistakes == 0) break;
  }
  const double steps = static_cast<double>(step);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] -= u[k] / steps;
  model.set_parameters(std::move(w));
  if (report) *report = std::move(local);
  return model;
}

SequenceModel train(LearnerKind kind, const LabelScheme& scheme,
                    const std::vector<LabeledSequence>& data, const LearnerConfig& config,
                    TrainReport* report) {
  switch (kind) {
    case LearnerKind::crf_lbfgs: return train_crf_lbfgs(scheme, data, config, report);
    case LearnerKind::crf_pa: return train_pa(scheme, data, config, report);
    case LearnerKind::perceptron: return train_perceptron(scheme, data, config, report);
  }
  throw std::invalid_argument("unknown learner");
}

}  // namespace nerkit
