#include "nerkit/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

namespace nerkit {

std::vector<EntitySpan> spans_from_bio(const std::vector<std::string>& labels) {
  if (!is_valid_bio(labels))
    throw DataError("label sequence is not valid BIO; apply repair_bio before scoring");
  std::vector<EntitySpan> out;
  for (std::size_t i = 0; i < labels.size();) {
    auto [tag, type] = split_label(labels[i]);
    if (tag != 'B') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] == "I-" + type) ++j;
    out.push_back({type, i, j});
    i = j;
  }
  return out;
}

Scores make_scores(std::size_t gold, std::size_t pred, std::size_t correct) {
  Scores s;
  s.gold_count = gold;
  s.pred_count = pred;
  s.correct_count = correct;
  s.precision = pred == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(pred);
  s.recall = gold == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(gold);
  s.f1 = (s.precision + s.recall) == 0.0
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

EvalReport score(const std::vector<std::vector<std::string>>& gold,
                 const std::vector<std::vector<std::string>>& pred, EvalMode mode,
                 const std::vector<std::string>& types) {
  if (gold.size() != pred.size())
    throw DataError("gold has " + std::to_string(gold.size()) + " sentences but prediction has " +
                    std::to_string(pred.size()) + "; first unmatched sentence index " +
                    std::to_string(std::min(gold.size(), pred.size())));
  struct Counts {
    std::size_t gold = 0, pred = 0, correct = 0;
  };
  std::map<std::string, Counts> counts;
  if (mode == EvalMode::notypes)
    counts[kNoTypesName];
  else
    for (const auto& t : types) counts[t];

  auto retype = [&](std::vector<EntitySpan> spans) {
    if (mode == EvalMode::notypes)
      for (auto& s : spans) s.type = kNoTypesName;
    std::sort(spans.begin(), spans.end());
    return spans;
  };

  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i].size() != pred[i].size())
      throw DataError("sentence " + std::to_string(i) + ": gold has " +
                      std::to_string(gold[i].size()) + " tokens, prediction has " +
                      std::to_string(pred[i].size()));
    const auto g = retype(spans_from_bio(gold[i]));
    const auto p = retype(spans_from_bio(pred[i]));
    for (const auto& s : g) ++counts[s.type].gold;
    for (const auto& s : p) ++counts[s.type].pred;
    std::vector<EntitySpan> both;
    std::set_intersection(g.begin(), g.end(), p.begin(), p.end(), std::back_inserter(both));
    for (const auto& s : both) ++counts[s.type].correct;
  }

  EvalReport report;
  report.mode = mode;
  Counts total;
  for (const auto& [type, c] : counts) {
    report.per_type[type] = make_scores(c.gold, c.pred, c.correct);
    total.gold += c.gold;
    total.pred += c.pred;
    total.correct += c.correct;
  }
  report.overall = make_scores(total.gold, total.pred, total.correct);
  return report;
}

EvalReport score(const std::vector<Sentence>& gold, const std::vector<Sentence>& pred,
                 EvalMode mode, const std::vector<std::string>& types) {
  auto labels_of = [](const std::vector<Sentence>& xs, const char* what) {
    std::vector<std::vector<std::string>> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!xs[i].labels)
        throw DataError(std::string(what) + " sentence " + std::to_string(i) + " has no labels");
      out.push_back(*xs[i].labels);
    }
    return out;
  };
  if (gold.size() == pred.size())
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i].size() != pred[i].size())
        throw DataError("sentence " + std::to_string(i) + " differs in length between gold and prediction");
      for (std::size_t t = 0; t < gold[i].size(); ++t)
        if (gold[i].tokens[t].text != pred[i].tokens[t].text)
          throw DataError("sentence " + std::to_string(i) + ": token " + std::to_string(t) +
                          " differs between gold and prediction");
    }
  return score(labels_of(gold, "gold"), labels_of(pred, "predicted"), mode, types);
}

namespace {

std::string row(const std::string& name, const Scores& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%17s  %6.2f  %6.2f  %6.2f\n", name.c_str(), s.precision,
                s.recall, s.f1);
  return buf;
}

void kv(std::ostringstream& out, const std::string& prefix, const Scores& s) {
  char buf[64];
  auto put = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.2f", v);
    out << prefix << '.' << key << '=' << buf << '\n';
  };
  put("precision", s.precision);
  put("recall", s.recall);
  put("f1", s.f1);
  out << prefix << ".gold=" << s.gold_count << '\n';
  out << prefix << ".pred=" << s.pred_count << '\n';
  out << prefix << ".correct=" << s.correct_count << '\n';
}

}  // namespace

std::string render_table(const EvalReport& typed, const EvalReport* notypes) {
  std::string rule(42, '-');
  rule += '\n';
  std::string out;
  char head[160];
  std::snprintf(head, sizeof head, "%17s  %6s  %6s  %6s\n", "Entity type", "P", "R", "F1");
  out += head;
  out += rule;
  if (typed.mode == EvalMode::typed)
    for (const auto& [type, s] : typed.per_type) out += row(type, s);
  out += rule;
  out += row(typed.mode == EvalMode::typed ? "Overall" : "No types", typed.overall);
  if (notypes) {
    out += rule;
    out += row("No types", notypes->overall);
  }
  out += rule;
  return out;
}

std::string render_kv(const EvalReport& typed, const EvalReport* notypes) {
  std::ostringstream out;
  if (typed.mode == EvalMode::typed)
    for (const auto& [type, s] : typed.per_type) kv(out, "type." + type, s);
  kv(out, typed.mode == EvalMode::typed ? "overall" : "notypes", typed.overall);
  if (notypes) kv(out, "notypes", notypes->overall);
  return out.str();
}

}  // namespace nerkit
