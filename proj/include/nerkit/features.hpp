#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nerkit/corpus.hpp"
#include "nerkit/distrib.hpp"
#include "nerkit/gazetteer.hpp"

namespace nerkit {

/// Sparse feature name -> value map for one token. Zero values are never
/// stored.
class FeatureVector {
 public:
  void add(const std::string& name, double value = 1.0);
  double get(const std::string& name) const;
  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  void scale(double factor);

  const std::map<std::string, double>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool operator==(const FeatureVector&) const = default;

 private:
  std::map<std::string, double> entries_;
};

struct FeatureConfig {
  int window_left = -2;
  int window_right = 2;
  std::vector<int> affix_lengths = {1, 2, 3};
  std::vector<int> cluster_depths = kDefaultClusterDepths;
  bool use_pos = true;
  bool use_clusters = true;
  bool use_term_freq = true;
  bool use_gazetteers = true;
  double old_epoch_weight = 0.7;
  std::set<std::string> new_epochs;

  void validate() const;

  /// Flat key=value form, stored in model headers so tagging can rebuild
  /// the exact training-time templates.
  std::map<std::string, std::string> to_kv() const;
  static FeatureConfig from_kv(const std::map<std::string, std::string>& kv);
};

struct FeatureResources {
  const ClusterModel* clusters = nullptr;
  const TermFrequencyModel* term_freq = nullptr;
  const GazetteerCatalog* gazetteers = nullptr;
};

/// Upper -> X, lower -> x, digit -> 0, anything else verbatim.
std::string shape(std::string_view word);
/// shape() with runs of identical characters collapsed.
std::string shape_short(std::string_view word);
std::string collapse_runs(std::string_view s);

/// Per-token features for one sentence. Throws if an enabled resource is
/// missing.
std::vector<FeatureVector> extract(const Sentence& sentence, const FeatureResources& resources,
                                   const FeatureConfig& config);

/// Scale applied to a training sentence: old_epoch_weight when its epoch is
/// known and not among the new epochs, 1 otherwise; times sentence.weight.
double instance_scale(const Sentence& sentence, const FeatureConfig& config);

std::vector<FeatureVector> apply_epoch_weight(std::vector<FeatureVector> vectors,
                                              const Sentence& sentence,
                                              const FeatureConfig& config);

/// extract() over a corpus (OpenMP over sentences); when `training`, epoch
/// weighting is applied too. Output order matches input order.
std::vector<std::vector<FeatureVector>> extract_corpus(const std::vector<Sentence>& sentences,
                                                       const FeatureResources& resources,
                                                       const FeatureConfig& config,
                                                       bool training);

/// `token<TAB>label<TAB>name=value ...`, blank line between sentences.
void write_feature_dump(const std::vector<Sentence>& sentences,
                        const std::vector<std::vector<FeatureVector>>& features,
                        std::ostream& out);

}  // namespace nerkit
