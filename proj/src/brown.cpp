#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "nerkit/corpus.hpp"
#include "nerkit/distrib.hpp"
#include "nerkit/log.hpp"
#include "nerkit/text.hpp"

namespace nerkit {

void ClusterConfig::validate() const {
  if (num_classes < 2) throw std::invalid_argument("num_classes must be at least 2");
  if (depths.empty()) throw std::invalid_argument("at least one cluster depth is required");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] <= 0) throw std::invalid_argument("cluster depths must be positive");
    if (i > 0 && depths[i] <= depths[i - 1])
      throw std::invalid_argument("cluster depths must be strictly increasing");
  }
}

std::string bit_prefix(std::string_view path, int depth) {
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(std::max(depth, 0)), path.size());
  return std::string(path.substr(0, n));
}

std::optional<std::string> ClusterModel::lookup_path(std::string_view word) const {
  auto it = paths.find(std::string(word));
  if (it == paths.end()) return std::nullopt;
  return it->second;
}

std::size_t ClusterModel::leaf_class_count() const {
  std::set<std::string_view> leaves;
  for (const auto& [w, p] : paths) leaves.insert(p);
  return leaves.size();
}

void ClusterModel::write(std::ostream& out) const {
  std::vector<std::pair<std::string_view, std::string_view>> rows;
  rows.reserve(paths.size());
  for (const auto& [w, p] : paths) rows.emplace_back(p, w);
  std::sort(rows.begin(), rows.end());
  for (const auto& [p, w] : rows) {
    auto it = counts.find(std::string(w));
    out << p << '\t' << w << '\t' << (it == counts.end() ? 1 : it->second) << '\n';
  }
}

ClusterModel ClusterModel::read(std::istream& in) {
  ClusterModel model;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cols = text::split(line, '\t');
    const auto where = "paths file line " + std::to_string(line_no) + ": ";
    if (cols.size() != 3) throw DataError(where + "expected bitpath, word, count");
    const auto& path = cols[0];
    if (path.empty() || path.find_first_not_of("01") != std::string::npos)
      throw DataError(where + "bit path must be a non-empty string of 0/1");
    if (cols[1].empty()) throw DataError(where + "empty word");
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      count = std::stoull(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(where + "count must be a positive integer");
    }
    if (count == 0) throw DataError(where + "count must be a positive integer");
    if (!model.paths.emplace(cols[1], path).second)
      throw DataError(where + "duplicate word '" + cols[1] + "'");
    model.counts[cols[1]] = count;
  }
  model.num_classes = model.leaf_class_count();
  return model;
}

namespace {

struct Vocabulary {
  std::vector<std::string> words;  // by rank
  std::vector<std::uint64_t> counts;
  // (neighbour rank, count), sorted by neighbour rank.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> right;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> left;
  std::uint64_t total_tokens = 0;
  std::uint64_t total_bigrams = 0;
};

Vocabulary build_vocabulary(const TokenCorpus& corpus, std::size_t min_count) {
  std::unordered_map<std::string, std::uint64_t> raw;
  for (const auto& sent : corpus)
    for (const auto& w : sent) ++raw[w];

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : raw)
    if (c >= min_count) kept.emplace_back(w, c);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  std::unordered_map<std::string, std::uint32_t> rank;
  for (auto& [w, c] : kept) {
    rank.emplace(w, static_cast<std::uint32_t>(v.words.size()));
    v.words.push_back(w);
    v.counts.push_back(c);
    v.total_tokens += c;
  }

  std::unordered_map<std::uint64_t, std::uint64_t> bigrams;
  for (const auto& sent : corpus) {
    std::int64_t prev = -1;
    for (const auto& w : sent) {
      auto it = rank.find(w);
      const std::int64_t cur = it == rank.end() ? std::int64_t{-1} : std::int64_t{it->second};
      if (prev >= 0 && cur >= 0) {
        ++bigrams[(static_cast<std::uint64_t>(prev) << 32) | static_cast<std::uint64_t>(cur)];
        ++v.total_bigrams;
      }
      prev = cur;
    }
  }
  v.right.resize(v.words.size());
  v.left.resize(v.words.size());
  for (const auto& [key, n] : bigrams) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    v.right[a].emplace_back(b, n);
    v.left[b].emplace_back(a, n);
  }
  for (auto& l : v.right) std::sort(l.begin(), l.end());
  for (auto& l : v.left) std::sort(l.begin(), l.end());
  return v;
}

inline double q_term(double joint, double pa, double pb) {
  return joint > 0.0 ? joint * std::log(joint / (pa * pb)) : 0.0;
}

// Cluster state for up to `capacity` simultaneously active classes. All
// matrices are dense capacity x capacity, indexed by slot.
class BrownEngine {
 public:
  BrownEngine(const Vocabulary& vocab, std::size_t capacity, BrownKernel kernel)
      : vocab_(vocab),
        k_(capacity),
        kernel_(kernel),
        p1_(k_, 0.0),
        p2_(k_ * k_, 0.0),
        q2_(k_ * k_, 0.0),
        loss_(k_ * k_, 0.0),
        rank_(k_, 0),
        min_word_(k_),
        members_(k_),
        slot_of_word_(vocab.words.size(), -1) {}

  std::size_t active_count() const { return active_.size(); }
  const std::vector<int>& active() const { return active_; }
  std::uint32_t rank(int s) const { return rank_[s]; }
  const std::vector<std::uint32_t>& members(int s) const { return members_[s]; }

  void admit(std::uint32_t word) {
    int c = -1;
    for (std::size_t s = 0; s < k_; ++s)
      if (members_[s].empty()) {
        c = static_cast<int>(s);
        break;
      }
    if (c < 0) throw std::logic_error("brown: no free cluster slot");

    const double nb = vocab_.total_bigrams > 0 ? static_cast<double>(vocab_.total_bigrams) : 1.0;
    p1_[c] = static_cast<double>(vocab_.counts[word]) / static_cast<double>(vocab_.total_tokens);
    for (std::size_t x = 0; x < k_; ++x) {
      p2(c, x) = p2(x, c) = 0.0;
      q2(c, x) = q2(x, c) = 0.0;
    }
    members_[c] = {word};
    rank_[c] = word;
    min_word_[c] = vocab_.words[word];
    slot_of_word_[word] = c;
    active_.insert(std::upper_bound(active_.begin(), active_.end(), c), c);

    for (const auto& [v, n] : vocab_.right[word]) {
      const int s = slot_of_word_[v];
      if (s >= 0) p2(c, s) += static_cast<double>(n) / nb;
    }
    for (const auto& [v, n] : vocab_.left[word]) {
      const int s = slot_of_word_[v];
      if (s >= 0 && v != word) p2(s, c) += static_cast<double>(n) / nb;
    }
    refresh_q(c);

    if (kernel_ == BrownKernel::reference) {
      recompute_all_losses();
      return;
    }
    // Existing pair losses gain the terms involving the new class.
    const auto n = active_.size();
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) {
      const int s = active_[i];
      if (s == c) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        const int t = active_[j];
        if (t == c) continue;
        loss(s, t) += interaction(s, t, c);
      }
    }
    refresh_losses_for(c);
  }

  double direct_loss(int a, int b) const {
    const double pab = p1_[a] + p1_[b];
    double before = q2(a, a) + q2(a, b) + q2(b, a) + q2(b, b);
    double after = q_term(p2(a, a) + p2(a, b) + p2(b, a) + p2(b, b), pab, pab);
    for (int x : active_) {
      if (x == a || x == b) continue;
      before += q2(a, x) + q2(x, a) + q2(b, x) + q2(x, b);
      after += q_term(p2(a, x) + p2(b, x), pab, p1_[x]) + q_term(p2(x, a) + p2(x, b), p1_[x], pab);
    }
    return before - after;
  }

  double stored_loss(int a, int b) const { return a < b ? loss(a, b) : loss(b, a); }

  /// Least-loss active pair; ties go to the pair whose smallest member
  /// words are lexicographically smallest.
  std::pair<int, int> best_pair() const {
    std::pair<int, int> best{-1, -1};
    double best_loss = 0.0;
    std::pair<std::string_view, std::string_view> best_key;
    const auto n = active_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const int s = active_[i], t = active_[j];
        const double l = loss(s, t);
        std::string_view ws = min_word(s), wt = min_word(t);
        const std::pair<std::string_view, std::string_view> key =
            ws < wt ? std::pair(ws, wt) : std::pair(wt, ws);
        const double tol = 1e-12 * std::max(1.0, std::abs(best_loss));
        if (best.first < 0 || l < best_loss - tol ||
            (l <= best_loss + tol && key < best_key)) {
          best = {s, t};
          best_loss = l;
          best_key = key;
        }
      }
    }
    return best;
  }

  /// Merges `drop` into `keep`; `keep` must hold the earlier-ranked class.
  void merge(int keep, int drop) {
    if (kernel_ == BrownKernel::incremental) {
      // Remove the contributions of the two old classes from every other
      // pair's loss, merge, then add back the merged class's contribution.
      const auto n = active_.size();
#pragma omp parallel for schedule(dynamic, 8)
      for (std::size_t i = 0; i < n; ++i) {
        const int s = active_[i];
        if (s == keep || s == drop) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
          const int t = active_[j];
          if (t == keep || t == drop) continue;
          loss(s, t) -= interaction(s, t, keep) + interaction(s, t, drop);
        }
      }
    }

    p2(keep, keep) = p2(keep, keep) + p2(keep, drop) + p2(drop, keep) + p2(drop, drop);
    for (int x : active_) {
      if (x == keep || x == drop) continue;
      p2(keep, x) += p2(drop, x);
      p2(x, keep) += p2(x, drop);
    }
    p1_[keep] += p1_[drop];
    for (std::size_t x = 0; x < k_; ++x) {
      p2(drop, x) = p2(x, drop) = 0.0;
      q2(drop, x) = q2(x, drop) = 0.0;
    }
    p1_[drop] = 0.0;
    rank_[keep] = std::min(rank_[keep], rank_[drop]);
    min_word_[keep] = std::min(min_word_[keep], min_word_[drop]);
    auto& km = members_[keep];
    km.insert(km.end(), members_[drop].begin(), members_[drop].end());
    std::sort(km.begin(), km.end());
    for (auto w : members_[drop]) slot_of_word_[w] = keep;
    members_[drop].clear();
    active_.erase(std::find(active_.begin(), active_.end(), drop));
    refresh_q(keep);

    if (kernel_ == BrownKernel::reference) {
      recompute_all_losses();
      return;
    }
    const auto n = active_.size();
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = 0; i < n; ++i) {
      const int s = active_[i];
      if (s == keep) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        const int t = active_[j];
        if (t == keep) continue;
        loss(s, t) += interaction(s, t, keep);
      }
    }
    refresh_losses_for(keep);
  }

 private:
  double& p2(std::size_t a, std::size_t b) { return p2_[a * k_ + b]; }
  double p2(std::size_t a, std::size_t b) const { return p2_[a * k_ + b]; }
  double& q2(std::size_t a, std::size_t b) { return q2_[a * k_ + b]; }
  double q2(std::size_t a, std::size_t b) const { return q2_[a * k_ + b]; }
  double& loss(std::size_t a, std::size_t b) { return loss_[a * k_ + b]; }
  double loss(std::size_t a, std::size_t b) const { return loss_[a * k_ + b]; }

  std::string_view min_word(int s) const { return min_word_[s]; }

  void refresh_q(int c) {
    for (int x : active_) {
      q2(c, x) = q_term(p2(c, x), p1_[c], p1_[x]);
      q2(x, c) = q_term(p2(x, c), p1_[x], p1_[c]);
    }
  }

  // Part of loss(s,t) that involves the third class x: the mutual
  // information terms between x and s, t separately minus those between x
  // and the hypothetical union s+t.
  double interaction(int s, int t, int x) const {
    const double pst = p1_[s] + p1_[t];
    return q2(s, x) + q2(x, s) + q2(t, x) + q2(x, t) -
           q_term(p2(s, x) + p2(t, x), pst, p1_[x]) - q_term(p2(x, s) + p2(x, t), p1_[x], pst);
  }

  void refresh_losses_for(int c) {
    const auto n = active_.size();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) {
      const int x = active_[i];
      if (x == c) continue;
      const double l = direct_loss(c, x);
      if (c < x)
        loss(c, x) = l;
      else
        loss(x, c) = l;
    }
  }

  void recompute_all_losses() {
    const auto n = active_.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        loss(active_[i], active_[j]) = direct_loss(active_[i], active_[j]);
  }

  const Vocabulary& vocab_;
  std::size_t k_;
  BrownKernel kernel_;
  std::vector<double> p1_, p2_, q2_, loss_;
  std::vector<std::uint32_t> rank_;
  std::vector<std::string_view> min_word_;
  std::vector<std::vector<std::uint32_t>> members_;
  std::vector<int> slot_of_word_;
  std::vector<int> active_;  // sorted slot indices
};

void record_step(BrownTrace* trace, const BrownEngine& engine, const Vocabulary& vocab,
                 MergeStep::Phase phase, int keep, int drop) {
  if (!trace) return;
  std::vector<int> order = engine.active();
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return engine.rank(a) < engine.rank(b); });
  MergeStep step{phase, {}, 0, 0, engine.stored_loss(keep, drop)};
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::vector<std::string> words;
    for (auto w : engine.members(order[i])) words.push_back(vocab.words[w]);
    step.clusters.push_back(std::move(words));
    if (order[i] == keep) step.first = i;
    if (order[i] == drop) step.second = i;
  }
  trace->steps.push_back(std::move(step));
}

}  // namespace

ClusterModel train_brown(const TokenCorpus& corpus, const ClusterConfig& config,
                         BrownTrace* trace, BrownKernel kernel) {
  config.validate();
  const Vocabulary vocab = build_vocabulary(corpus, config.min_count);
  if (vocab.words.empty()) throw std::invalid_argument("brown clustering needs a non-empty corpus");

  std::size_t classes = config.num_classes;
  if (vocab.words.size() < classes) {
    warn("only " + std::to_string(vocab.words.size()) + " distinct words for " +
         std::to_string(classes) + " classes; each word becomes its own class");
    classes = vocab.words.size();
  }

  BrownEngine engine(vocab, classes + 1, kernel);
  auto merge_best = [&](MergeStep::Phase phase) {
    auto [a, b] = engine.best_pair();
    const int keep = engine.rank(a) < engine.rank(b) ? a : b;
    const int drop = keep == a ? b : a;
    record_step(trace, engine, vocab, phase, keep, drop);
    engine.merge(keep, drop);
    return std::pair(keep, drop);
  };

  for (std::uint32_t w = 0; w < vocab.words.size(); ++w) {
    engine.admit(w);
    if (engine.active_count() > classes) merge_best(MergeStep::Phase::absorb);
  }

  // Leaf classes are the clusters left after the windowed pass.
  std::vector<std::vector<std::uint32_t>> leaf_words;
  std::vector<std::string> leaf_paths;
  std::vector<std::vector<std::size_t>> leaves_in_slot(classes + 1);
  for (int s : engine.active()) {
    leaves_in_slot[s].push_back(leaf_words.size());
    leaf_words.push_back(engine.members(s));
    leaf_paths.emplace_back();
  }
  if (leaf_words.size() == 1) leaf_paths[0] = "0";

  while (engine.active_count() > 1) {
    auto [keep, drop] = merge_best(MergeStep::Phase::hierarchy);
    for (auto leaf : leaves_in_slot[keep]) leaf_paths[leaf].insert(0, 1, '0');
    for (auto leaf : leaves_in_slot[drop]) leaf_paths[leaf].insert(0, 1, '1');
    auto& kl = leaves_in_slot[keep];
    kl.insert(kl.end(), leaves_in_slot[drop].begin(), leaves_in_slot[drop].end());
    leaves_in_slot[drop].clear();
  }

  ClusterModel model;
  model.num_classes = config.num_classes;
  for (std::size_t leaf = 0; leaf < leaf_words.size(); ++leaf) {
    for (auto w : leaf_words[leaf]) {
      model.paths.emplace(vocab.words[w], leaf_paths[leaf]);
      model.counts.emplace(vocab.words[w], vocab.counts[w]);
    }
  }
  return model;
}

}  // namespace nerkit
