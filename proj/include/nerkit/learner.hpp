#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nerkit/inference.hpp"
#include "nerkit/lbfgs.hpp"
#include "nerkit/model.hpp"

namespace nerkit {

struct LearnerConfig {
  double l2_sigma2 = 10.0;
  std::size_t lbfgs_memory = 10;
  std::size_t max_iterations = 200;
  double grad_tolerance = 1e-5;
  double pa_c = 1.0;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;

  void validate() const;
};

/// A training sequence: per-token features (already epoch-weighted) and
/// gold labels.
struct LabeledSequence {
  std::vector<FeatureVector> features;
  std::vector<std::string> labels;
};

struct TrainReport {
  double objective = 0.0;              // crf-lbfgs: final regularised log-likelihood
  std::vector<double> history;         // crf-lbfgs: objective per accepted iteration
  std::size_t iterations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<std::size_t> mistakes;   // online learners: mistakes per epoch
  std::size_t updates = 0;
  std::size_t skipped = 0;             // PA: zero-norm differences with positive loss
};

/// Regularised conditional log-likelihood of a compiled data set
///   sum_i [score(x_i, y_i) - log Z(x_i)] - ||w||^2 / (2 sigma2)
/// and its gradient. Instance weighting enters only through feature values.
class CrfObjective {
 public:
  CrfObjective(const std::vector<Instance>& data, std::size_t num_labels,
               std::size_t num_features, double l2_sigma2);

  std::size_t dimension() const { return dim_; }

  /// OpenMP kernel. Every reduction runs in a fixed order, so results are
  /// bit-identical for any thread count.
  double evaluate(std::span<const double> w, std::span<double> grad) const;

  /// Straightforward serial accumulation, kept as the reference.
  double evaluate_serial(std::span<const double> w, std::span<double> grad) const;

 private:
  struct Occurrence {
    std::uint32_t instance;
    std::uint32_t position;
    double value;
  };

  const std::vector<Instance>& data_;
  std::size_t labels_;
  std::size_t features_;
  std::size_t dim_;
  double sigma2_;
  std::vector<double> empirical_;              // gold feature counts
  std::vector<std::size_t> token_offset_;      // per instance, into marginal buffer
  std::vector<std::uint32_t> occ_offsets_;     // CSR by feature id
  std::vector<Occurrence> occurrences_;
  mutable std::vector<double> marginals_;      // total tokens x L
  mutable std::vector<double> transitions_;    // instances x (L+1) x L
  mutable std::vector<double> loglik_;         // per instance
};

/// Convenience wrapper matching the objective/gradient pair used in tests.
double crf_objective_and_gradient(const std::vector<Instance>& data, const WeightView& w,
                                  std::size_t num_features, double l2_sigma2,
                                  std::span<double> grad);

/// Compiles a labelled data set into a fresh model dictionary.
SequenceModel build_dictionary(const LabelScheme& scheme, LearnerKind kind,
                               const std::vector<LabeledSequence>& data,
                               std::vector<Instance>& instances);

SequenceModel train_crf_lbfgs(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                              const LearnerConfig& config, TrainReport* report = nullptr);

struct PaUpdate {
  std::vector<std::size_t> predicted;  // cost-augmented argmax
  double loss = 0.0;                   // score(pred) - score(gold) + cost(pred)
  double tau = 0.0;
  double sq_norm = 0.0;
  bool updated = false;
  bool skipped = false;
};

/// One passive-aggressive (PA-I) step on a single instance, in place.
PaUpdate pa_step(std::span<double> w, std::size_t num_labels, const LabelScheme& scheme,
                 const Instance& inst, double c);

using PaObserver = std::function<void(const PaUpdate&)>;

SequenceModel train_pa(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                       const LearnerConfig& config, TrainReport* report = nullptr,
                       const PaObserver& observer = {});

/// Averaged structured perceptron. The returned weights are the mean of the
/// weight vector after every instance visit; training stops after the
/// first epoch without mistakes.
SequenceModel train_perceptron(const LabelScheme& scheme, const std::vector<LabeledSequence>& data,
                               const LearnerConfig& config, TrainReport* report = nullptr);

SequenceModel train(LearnerKind kind, const LabelScheme& scheme,
                    const std::vector<LabeledSequence>& data, const LearnerConfig& config,
                    TrainReport* report = nullptr);

/// Phi(gold) - Phi(pred) as sorted (parameter index, value) pairs, zeros
/// dropped.
std::vector<std::pair<std::size_t, double>> feature_difference(
    std::size_t num_labels, const Instance& inst, const std::vector<std::size_t>& gold,
    const std::vector<std::size_t>& pred);

/// Deterministic Fisher-Yates order for an epoch.
std::vector<std::size_t> epoch_order(std::size_t n, std::uint64_t seed, std::size_t epoch);

}  // namespace nerkit
