#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "nerkit/corpus.hpp"
#include "nerkit/distrib.hpp"
#include "nerkit/text.hpp"

namespace nerkit {

TermFrequencyModel build_term_freq(const TokenCorpus& corpus, std::size_t cutoff_rank) {
  if (cutoff_rank == 0) throw std::invalid_argument("term-frequency cutoff must be positive");
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& sent : corpus)
    for (const auto& w : sent) {
      ++counts[w];
      ++total;
    }
  if (total == 0) throw std::invalid_argument("term frequencies need a non-empty corpus");

  std::vector<std::pair<std::string, std::uint64_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > cutoff_rank) ranked.resize(cutoff_rank);

  TermFrequencyModel model;
  model.cutoff_rank = cutoff_rank;
  model.total_tokens = total;
  for (const auto& [w, c] : ranked)
    model.relfreq.emplace(w, static_cast<double>(c) / static_cast<double>(total));
  return model;
}

std::optional<double> TermFrequencyModel::feature_value(std::string_view word) const {
  auto it = relfreq.find(std::string(word));
  if (it == relfreq.end()) return std::nullopt;
  return kTermFreqScale * it->second;
}

void TermFrequencyModel::write(std::ostream& out) const {
  std::vector<std::pair<std::string_view, double>> rows(relfreq.begin(), relfreq.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  out << "#total_tokens=" << total_tokens << '\n';
  for (const auto& [w, f] : rows) out << w << '\t' << text::format_real(f) << '\n';
}

TermFrequencyModel TermFrequencyModel::read(std::istream& in) {
  TermFrequencyModel model;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto where = "term-frequency file line " + std::to_string(line_no) + ": ";
    const bool has_tab = line.find('\t') != std::string::npos;
    if (!has_tab && line.rfind("#total_tokens=", 0) == 0) {
      try {
        model.total_tokens = std::stoull(line.substr(14));
      } catch (const std::exception&) {
        throw DataError(where + "bad total_tokens header");
      }
      saw_header = true;
      continue;
    }
    // Hashtags are words, so only tab-less '#' lines are comments.
    if (text::trim(line).empty() || (line[0] == '#' && !has_tab)) continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty()) throw DataError(where + "expected word<TAB>relfreq");
    double f = 0.0;
    try {
      std::size_t used = 0;
      f = std::stod(cols[1], &used);
      if (used != cols[1].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError(where + "relative frequency is not a number");
    }
    if (!(f > 0.0 && f <= 1.0)) throw DataError(where + "relative frequency outside (0,1]");
    if (!model.relfreq.emplace(cols[0], f).second)
      throw DataError(where + "duplicate word '" + cols[0] + "'");
  }
  if (!saw_header) throw DataError("term-frequency file lacks the #total_tokens header");
  model.cutoff_rank = std::max<std::size_t>(model.relfreq.size(), 1);
  return model;
}

}  // namespace nerkit
