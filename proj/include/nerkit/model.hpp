#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "nerkit/corpus.hpp"
#include "nerkit/features.hpp"

namespace nerkit {

enum class LearnerKind { crf_lbfgs, crf_pa, perceptron };

std::string to_string(LearnerKind kind);
LearnerKind parse_learner(const std::string& name);

/// Read-only view of a flat parameter vector. Layout: (L+1) x L transition
/// block first (row L is the start state), then one row of L emission
/// weights per observation feature.
struct WeightView {
  std::span<const double> w;
  std::size_t num_labels;

  std::size_t transition_index(std::size_t from, std::size_t to) const {
    return from * num_labels + to;
  }
  std::size_t emission_index(std::uint32_t feature, std::size_t label) const {
    return (num_labels + 1) * num_labels + static_cast<std::size_t>(feature) * num_labels + label;
  }
  double transition(std::size_t from, std::size_t to) const { return w[transition_index(from, to)]; }
  double start(std::size_t to) const { return w[transition_index(num_labels, to)]; }
  double emission(std::uint32_t feature, std::size_t label) const {
    return w[emission_index(feature, label)];
  }
};

inline std::size_t parameter_count(std::size_t num_labels, std::size_t num_features) {
  return (num_labels + 1) * num_labels + num_features * num_labels;
}

/// A sentence compiled against a feature dictionary: CSR rows of
/// (feature id, value) per position plus optional gold label indices.
struct Instance {
  std::vector<std::uint32_t> offsets{0};
  std::vector<std::uint32_t> ids;
  std::vector<double> values;
  std::vector<std::size_t> labels;

  std::size_t length() const { return offsets.size() - 1; }
  bool labeled() const { return !labels.empty(); }
};

struct TopFeature {
  std::string name;
  std::string label;
  double weight;
};

class SequenceModel {
 public:
  static constexpr int kFormatVersion = 1;

  SequenceModel() = default;
  SequenceModel(LabelScheme scheme, LearnerKind learner);

  const LabelScheme& scheme() const { return scheme_; }
  std::size_t num_labels() const { return scheme_.num_labels(); }
  LearnerKind learner() const { return learner_; }
  void set_learner(LearnerKind k) { learner_ = k; }

  std::size_t num_features() const { return feature_names_.size(); }
  std::optional<std::uint32_t> feature_id(const std::string& name) const;
  std::uint32_t intern_feature(const std::string& name);
  const std::string& feature_name(std::uint32_t id) const { return feature_names_[id]; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> mutable_parameters() { return params_; }
  void set_parameters(std::vector<double> params);
  WeightView view() const { return {params_, num_labels()}; }

  /// Free-form key/value header entries (feature configuration, resource
  /// paths, training provenance).
  std::map<std::string, std::string>& metadata() { return metadata_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

  /// Non-zero weights keyed by (feature, label); transitions appear as
  /// ("T:<from>", "<to>") with "<start>" for the initial state.
  std::map<std::pair<std::string, std::string>, double> weight_map() const;

  /// Compiles feature vectors against the dictionary. With `grow`, unseen
  /// feature names are added; otherwise they are dropped.
  Instance compile(const std::vector<FeatureVector>& features,
                   const std::vector<std::string>* labels, bool grow);

  Instance compile(const std::vector<FeatureVector>& features,
                   const std::vector<std::string>* labels = nullptr) const;

  void save(std::ostream& out) const;
  static SequenceModel load(std::istream& in);

  /// Largest weights by magnitude. Non-empty `prefixes` keep only emission
  /// weights whose feature name starts with one of them.
  std::vector<TopFeature> top_features(std::size_t k,
                                       const std::vector<std::string>& prefixes = {}) const;

 private:
  LabelScheme scheme_;
  LearnerKind learner_ = LearnerKind::crf_lbfgs;
  std::vector<std::string> feature_names_;
  std::unordered_map<std::string, std::uint32_t> feature_index_;
  std::vector<double> params_;
  std::map<std::string, std::string> metadata_;
};

inline const std::string kStartLabel = "<start>";

/// Model equality on scheme, learner and non-zero weights.
bool same_weights(const SequenceModel& a, const SequenceModel& b);

}  // namespace nerkit
