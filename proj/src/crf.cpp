#include <cmath>
#include <exception>
#include <stdexcept>

#include "nerkit/learner.hpp"
#include "nerkit/log.hpp"

namespace nerkit {

void LearnerConfig::validate() const {
  if (!(l2_sigma2 > 0.0)) throw std::invalid_argument("l2_sigma2 must be positive");
  if (lbfgs_memory == 0) throw std::invalid_argument("lbfgs_memory must be positive");
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (!(grad_tolerance > 0.0)) throw std::invalid_argument("grad_tolerance must be positive");
  if (!(pa_c > 0.0)) throw std::invalid_argument("pa_c must be positive");
  if (epochs == 0) throw std::invalid_argument("epochs must be positive");
}

CrfObjective::CrfObjective(const std::vector<Instance>& data, std::size_t num_labels,
                           std::size_t num_features, double l2_sigma2)
    : data_(data),
      labels_(num_labels),
      features_(num_features),
      dim_(parameter_count(num_labels, num_features)),
      sigma2_(l2_sigma2),
      empirical_(dim_, 0.0) {
  if (!(l2_sigma2 > 0.0)) throw std::invalid_argument("l2_sigma2 must be positive");
  const WeightView layout{{}, labels_};
  std::vector<std::uint32_t> per_feature(features_, 0);
  std::size_t tokens = 0;
  token_offset_.reserve(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto& inst = data_[i];
    if (inst.length() == 0) throw std::invalid_argument("empty training instance");
    if (!inst.labeled() || inst.labels.size() != inst.length())
      throw std::invalid_argument("training instance " + std::to_string(i) + " is unlabeled");
    token_offset_.push_back(tokens);
    tokens += inst.length();
    for (std::size_t t = 0; t < inst.length(); ++t) {
      const auto y = inst.labels[t];
      if (y >= labels_) throw std::invalid_argument("label outside scheme");
      empirical_[t == 0 ? layout.transition_index(labels_, y)
                        : layout.transition_index(inst.labels[t - 1], y)] += 1.0;
      for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k) {
        if (inst.ids[k] >= features_) throw std::invalid_argument("feature id outside dictionary");
        empirical_[layout.emission_index(inst.ids[k], y)] += inst.values[k];
        ++per_feature[inst.ids[k]];
      }
    }
  }

  occ_offsets_.assign(features_ + 1, 0);
  for (std::size_t f = 0; f < features_; ++f) occ_offsets_[f + 1] = occ_offsets_[f] + per_feature[f];
  occurrences_.resize(occ_offsets_.back());
  std::vector<std::uint32_t> fill(occ_offsets_.begin(), occ_offsets_.end() - 1);
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const auto& inst = data_[i];
    for (std::size_t t = 0; t < inst.length(); ++t)
      for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k)
        occurrences_[fill[inst.ids[k]]++] = {static_cast<std::uint32_t>(i),
                                             static_cast<std::uint32_t>(t), inst.values[k]};
  }

  marginals_.assign(tokens * labels_, 0.0);
  transitions_.assign(data_.size() * (labels_ + 1) * labels_, 0.0);
  loglik_.assign(data_.size(), 0.0);
}

double CrfObjective::evaluate(std::span<const double> w, std::span<double> grad) const {
  if (w.size() != dim_ || grad.size() != dim_)
    throw std::invalid_argument("parameter vector has the wrong dimension");
  const WeightView v{w, labels_};
  const auto L = labels_;
  const auto tblock = (L + 1) * L;
  const auto n = static_cast<std::ptrdiff_t>(data_.size());
  std::exception_ptr failure;

#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        const auto& inst = data_[i];
        const double log_z = forward_backward_expectations(
            v, inst, scratch, &marginals_[token_offset_[i] * L], &transitions_[i * tblock]);
        loglik_[i] = score_sequence(v, inst, inst.labels) - log_z;
      } catch (...) {
#pragma omp critical(nerkit_crf_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  double objective = 0.0;
  for (double ll : loglik_) objective += ll;
  double sq = 0.0;
  for (double x : w) sq += x * x;
  objective -= sq / (2.0 * sigma2_);

  for (std::size_t k = 0; k < tblock; ++k) grad[k] = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const double* te = &transitions_[i * tblock];
    for (std::size_t k = 0; k < tblock; ++k) grad[k] += te[k];
  }
  for (std::size_t k = 0; k < tblock; ++k) grad[k] = empirical_[k] - grad[k] - w[k] / sigma2_;

  const auto nf = static_cast<std::ptrdiff_t>(features_);
#pragma omp parallel
  {
    std::vector<double> acc(L);
#pragma omp for schedule(dynamic, 256)
    for (std::ptrdiff_t f = 0; f < nf; ++f) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (auto o = occ_offsets_[f]; o < occ_offsets_[f + 1]; ++o) {
        const auto& occ = occurrences_[o];
        const double* m = &marginals_[(token_offset_[occ.instance] + occ.position) * L];
        for (std::size_t l = 0; l < L; ++l) acc[l] += occ.value * m[l];
      }
      for (std::size_t l = 0; l < L; ++l) {
        const auto idx = v.emission_index(static_cast<std::uint32_t>(f), l);
        grad[idx] = empirical_[idx] - acc[l] - w[idx] / sigma2_;
      }
    }
  }
  return objective;
}

double CrfObjective::evaluate_serial(std::span<const double> w, std::span<double> grad) const {
  if (w.size() != dim_ || grad.size() != dim_)
    throw std::invalid_argument("parameter vector has the wrong dimension");
  const WeightView v{w, labels_};
  const auto L = labels_;
  std::fill(grad.begin(), grad.end(), 0.0);
  double objective = 0.0;
  for (const auto& inst : data_) {
    const auto lattice = forward_backward(v, inst);
    objective += score_sequence(v, inst, inst.labels) - lattice.log_z;
    for (std::size_t t = 0; t < inst.length(); ++t) {
      const auto y = inst.labels[t];
      if (t == 0) {
        grad[v.transition_index(L, y)] += 1.0;
        for (std::size_t l = 0; l < L; ++l) grad[v.transition_index(L, l)] -= lattice.unary(0, l);
      } else {
        grad[v.transition_index(inst.labels[t - 1], y)] += 1.0;
        const auto& pw = lattice.pairwise[t - 1];
        for (std::size_t p = 0; p < L; ++p)
          for (std::size_t l = 0; l < L; ++l) grad[v.transition_index(p, l)] -= pw(p, l);
      }
      for (auto k = inst.offsets[t]; k < inst.offsets[t + 1]; ++k) {
        const auto f = inst.ids[k];
        const double val = inst.values[k];
        grad[v.emission_index(f, y)] += val;
        for (std::size_t l = 0; l < L; ++l)
          grad[v.emission_index(f, l)] -= val * lattice.unary(t, l);
      }
    }
  }
  for (std::size_t k = 0; k < dim_; ++k) {
    objective -= w[k] * w[k] / (2.0 * sigma2_);
    grad[k] -= w[k] / sigma2_;
  }
  return objective;
}

double crf_objective_and_gradient(const std::vector<Instance>& data, const WeightView& w,
                                  std::size_t num_features, double l2_sigma2,
                                  std::span<double> grad) {
  CrfObjective obj(data, w.num_labels, num_features, l2_sigma2);
  return obj.evaluate(w.w, grad);
}

SequenceModel build_dictionary(const LabelScheme& scheme, LearnerKind kind,
                               const std::vector<LabeledSequence>& data,
                               std::vector<Instance>& instances) {
  if (data.empty()) throw std::invalid_argument("training data is empty");
  SequenceModel model(scheme, kind);
  instances.clear();
  instances.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& seq = data[i];
    if (seq.features.empty())
      throw std::invalid_argument("training sequence " + std::to_string(i) + " is empty");
    instances.push_back(model.compile(seq.features, &seq.labels, true));
  }
  return model;
}

SequenceModel train_crf_lbfgs(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                              const LearnerConfig& config, TrainReport* report) {
  config.validate();
  std::vector<Instance> instances;
  SequenceModel model = build_dictionary(scheme, LearnerKind::crf_lbfgs, data, instances);
  const CrfObjective objective(instances, model.num_labels(), model.num_features(),
                               config.l2_sigma2);

  LbfgsOptions opts;
  opts.memory = config.lbfgs_memory;
  opts.max_iterations = config.max_iterations;
  opts.grad_tolerance = config.grad_tolerance;
  auto negated = [&](std::span<const double> x, std::span<double> g) {
    const double f = objective.evaluate(x, g);
    for (auto& gi : g) gi = -gi;
    return -f;
  };
  auto result = lbfgs_minimize(negated, std::vector<double>(objective.dimension(), 0.0), opts);
  if (result.line_search_failed)
    warn("L-BFGS line search failed after " + std::to_string(result.iterations) +
         " iterations; keeping the best weights found");
  model.set_parameters(std::move(result.x));

  if (report) {
    report->objective = -result.value;
    report->history.clear();
    for (double h : result.history) report->history.push_back(-h);
    report->iterations = result.iterations;
    report->converged = result.converged;
    report->line_search_failed = result.line_search_failed;
  }
  return model;
}

}  // namespace nerkit
