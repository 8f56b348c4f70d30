#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "nerkit/corpus.hpp"

namespace nerkit {

struct EntitySpan {
  std::string type;
  std::size_t start;  // inclusive
  std::size_t end;    // exclusive

  auto operator<=>(const EntitySpan&) const = default;
  bool operator==(const EntitySpan&) const = default;
};

/// Maximal B-t (I-t)* runs. Throws on invalid BIO; repair_bio first.
std::vector<EntitySpan> spans_from_bio(const std::vector<std::string>& labels);

enum class EvalMode { typed, notypes };

inline const std::string kNoTypesName = "entity";

struct Scores {
  double precision = 0.0;  // percentages
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t gold_count = 0;
  std::size_t pred_count = 0;
  std::size_t correct_count = 0;
};

struct EvalReport {
  std::map<std::string, Scores> per_type;
  Scores overall;
  EvalMode mode = EvalMode::typed;
};

Scores make_scores(std::size_t gold, std::size_t pred, std::size_t correct);

/// Exact-match entity scoring. `types` pre-seeds per-type rows so types
/// with no entities still appear.
EvalReport score(const std::vector<std::vector<std::string>>& gold,
                 const std::vector<std::vector<std::string>>& pred, EvalMode mode,
                 const std::vector<std::string>& types = {});

EvalReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                 EvalMode mode, const std::vector<std::string>& types = {});

/// Per-type rows, "Overall", then "No types" when given.
std::string render_table(const EvalReport& typed, const EvalReport* notypes = nullptr);

/// One `key=value` metric per line.
std::string render_kv(const EvalReport& typed, const EvalReport* notypes = nullptr);

}  // namespace nerkit
