#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nerkit {

using TokenCorpus = std::vector<std::vector<std::string>>;

inline const std::vector<int> kDefaultClusterDepths = {3, 4, 5, 6, 7, 8, 9, 10, 12, 14, 16, 18, 20};

struct ClusterConfig {
  std::size_t num_classes = 2000;
  std::size_t min_count = 1;
  std::vector<int> depths = kDefaultClusterDepths;

  void validate() const;
};

/// Brown cluster paths: word -> bit string, plus the word's corpus count.
class ClusterModel {
 public:
  std::map<std::string, std::string> paths;
  std::map<std::string, std::uint64_t> counts;
  std::size_t num_classes = 0;

  std::optional<std::string> lookup_path(std::string_view word) const;
  std::size_t vocabulary_size() const { return paths.size(); }
  std::size_t leaf_class_count() const;

  /// `bitpath<TAB>word<TAB>count`, sorted by bitpath then word.
  void write(std::ostream& out) const;
  static ClusterModel read(std::istream& in);

  bool operator==(const ClusterModel&) const = default;
};

/// First min(depth, |path|) characters of a bit path.
std::string bit_prefix(std::string_view path, int depth);

/// One greedy merge as seen by the trainer. `clusters` lists the active
/// clusters (members in frequency order) immediately before the merge;
/// `first`/`second` index into it, `first` being the one that receives the
/// 0 bit when the step builds hierarchy.
struct MergeStep {
  enum class Phase { absorb, hierarchy };
  Phase phase;
  std::vector<std::vector<std::string>> clusters;
  std::size_t first;
  std::size_t second;
  double loss;
};

struct BrownTrace {
  std::vector<MergeStep> steps;
};

enum class BrownKernel {
  incremental,  // O(K^2) loss-table updates per step, OpenMP-parallel
  reference,    // serial full recomputation of every pair loss, O(K^3)
};

/// Greedy windowed Brown clustering. Words enter in order of decreasing
/// frequency (ties lexicographic); once num_classes+1 clusters are active
/// the pair with least loss of class-bigram mutual information is merged.
/// After the vocabulary is exhausted the remaining classes are merged down
/// to a single root, each merge prepending one bit to its members' paths.
///
/// The objective over active clusters is
///   sum_{c,c'} p(c,c') log p(c,c') / (p(c) p(c'))
/// where p(c) is the unigram mass of the class over the whole corpus and
/// p(c,c') the within-sentence bigram probability between active words.
ClusterModel train_brown(const TokenCorpus& corpus, const ClusterConfig& config,
                         BrownTrace* trace = nullptr,
                         BrownKernel kernel = BrownKernel::incremental);

class TermFrequencyModel {
 public:
  std::unordered_map<std::string, double> relfreq;
  std::size_t cutoff_rank = 50000;
  std::uint64_t total_tokens = 0;

  /// 100 x relative frequency, or nothing for out-of-model words.
  std::optional<double> feature_value(std::string_view word) const;

  /// `#total_tokens=N` header, then `word<TAB>relfreq` by decreasing frequency.
  void write(std::ostream& out) const;
  static TermFrequencyModel read(std::istream& in);
};

inline constexpr std::size_t kDefaultTermFreqCutoff = 50000;
inline constexpr double kTermFreqScale = 100.0;

/// Relative frequencies over the full corpus, truncated to the cutoff_rank
/// most frequent words (count ties broken lexicographically).
TermFrequencyModel build_term_freq(const TokenCorpus& corpus,
                                   std::size_t cutoff_rank = kDefaultTermFreqCutoff);

}  // namespace nerkit
