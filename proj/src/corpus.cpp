#include "nerkit/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "nerkit/text.hpp"

namespace nerkit {

std::vector<std::string> Sentence::forms() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

LabelScheme::LabelScheme(std::vector<std::string> types) : types_(std::move(types)) {
  if (types_.empty()) throw std::invalid_argument("label scheme needs at least one entity type");
  std::set<std::string> seen;
  labels_.push_back("O");
  for (const auto& t : types_) {
    if (t.empty() || text::has_whitespace(t))
      throw std::invalid_argument("invalid entity type name '" + t + "'");
    if (!seen.insert(t).second) throw std::invalid_argument("duplicate entity type '" + t + "'");
    labels_.push_back("B-" + t);
    labels_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) index_.emplace(labels_[i], i);
}

LabelScheme LabelScheme::wnut() {
  return LabelScheme({"company", "facility", "geo-loc", "movie", "musicartist", "other",
                      "person", "product", "sportsteam", "tvshow"});
}

LabelScheme LabelScheme::single(std::string type) {
  return LabelScheme({std::move(type)});
}

std::optional<std::size_t> LabelScheme::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LabelScheme::index_or_throw(std::string_view label) const {
  auto idx = index_of(label);
  if (!idx) throw DataError("unknown label '" + std::string(label) + "'");
  return *idx;
}

bool LabelScheme::has_type(std::string_view type) const {
  for (const auto& t : types_)
    if (t == type) return true;
  return false;
}

std::pair<char, std::string> split_label(std::string_view label) {
  if (label == "O") return {'O', ""};
  if (label.size() > 2 && (label[0] == 'B' || label[0] == 'I') && label[1] == '-')
    return {label[0], std::string(label.substr(2))};
  throw DataError("not a BIO label: '" + std::string(label) + "'");
}

namespace {

std::optional<std::size_t> first_invalid_bio(const std::vector<std::string>& labels) {
  std::string prev_type;
  char prev_tag = 'O';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [tag, type] = split_label(labels[i]);
    if (tag == 'I' && (prev_tag == 'O' || prev_type != type)) return i;
    prev_tag = tag;
    prev_type = std::move(type);
  }
  return std::nullopt;
}

}  // namespace

bool is_valid_bio(const std::vector<std::string>& labels) {
  return !first_invalid_bio(labels).has_value();
}

std::vector<std::string> repair_bio(const std::vector<std::string>& labels) {
  std::vector<std::string> out = labels;
  char prev_tag = 'O';
  std::string prev_type;
  for (auto& l : out) {
    auto [tag, type] = split_label(l);
    if (tag == 'I' && (prev_tag == 'O' || prev_type != type)) {
      l = "B-" + type;
      tag = 'B';
    }
    prev_tag = tag;
    prev_type = type;
  }
  return out;
}

namespace {

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  bool next(std::string& line) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
};

bool is_blank(std::string_view line) { return text::trim(line).empty(); }

}  // namespace

std::vector<Sentence> read_conll(std::istream& in, const LabelScheme& scheme,
                                 const ReadOptions& opts) {
  const bool has_labels = opts.labels != LabelColumn::absent;
  const std::size_t expected = 1 + (opts.pos_column ? 1 : 0) + (has_labels ? 1 : 0);

  std::vector<Sentence> out;
  Sentence cur;
  std::vector<std::size_t> cur_lines;

  auto flush = [&] {
    if (cur.tokens.empty()) return;
    if (opts.labels == LabelColumn::validated) {
      auto& labels = *cur.labels;
      if (auto bad = first_invalid_bio(labels)) {
        if (!opts.repair)
          throw DataError("line " + std::to_string(cur_lines[*bad]) + ": label '" +
                          labels[*bad] + "' does not continue an entity (repair rewrites it as B-)");
        labels = repair_bio(labels);
      }
    }
    out.push_back(std::move(cur));
    cur = Sentence{};
    cur_lines.clear();
  };

  LineReader reader{in};
  std::string line;
  while (reader.next(line)) {
    if (is_blank(line)) {
      flush();
      continue;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != expected)
      throw DataError("line " + std::to_string(reader.line_no) + ": expected " +
                      std::to_string(expected) + " tab-separated columns, found " +
                      std::to_string(cols.size()));
    Token tok;
    tok.text = cols[0];
    if (tok.text.empty())
      throw DataError("line " + std::to_string(reader.line_no) + ": empty token");
    if (opts.pos_column) tok.pos = cols[1];
    cur.tokens.push_back(std::move(tok));
    cur_lines.push_back(reader.line_no);
    if (opts.labels == LabelColumn::validated) {
      std::string label = cols.back();
      if (!scheme.contains(label)) {
        if (!opts.unknown_as_outside)
          throw DataError("line " + std::to_string(reader.line_no) + ": unknown label '" + label +
                          "'");
        label = "O";
      }
      if (!cur.labels) cur.labels.emplace();
      cur.labels->push_back(std::move(label));
    }
  }
  flush();
  return out;
}

std::vector<Sentence> read_conll_file(const std::string& path, const LabelScheme& scheme,
                                      const ReadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return read_conll(in, scheme, opts);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::size_t sniff_columns(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!is_blank(line)) return text::split(line, '\t').size();
  }
  return 0;
}

void write_conll(const std::vector<Sentence>& sentences, std::ostream& out) {
  bool any_pos = false;
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) any_pos = any_pos || t.pos.has_value();

  for (std::size_t si = 0; si < sentences.size(); ++si) {
    const auto& s = sentences[si];
    if (!s.labels) throw DataError("sentence " + std::to_string(si) + " has no labels to write");
    if (s.labels->size() != s.tokens.size())
      throw DataError("sentence " + std::to_string(si) + ": label count differs from token count");
    if (s.tokens.empty()) throw DataError("sentence " + std::to_string(si) + " is empty");
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const auto& t = s.tokens[i];
      if (t.text.empty() || t.text.find_first_of("\t\n\r") != std::string::npos)
        throw DataError("sentence " + std::to_string(si) + ": token not writable as a column");
      out << t.text;
      if (any_pos) {
        if (!t.pos)
          throw DataError("sentence " + std::to_string(si) +
                          ": POS column is present elsewhere but missing here");
        out << '\t' << *t.pos;
      }
      out << '\t' << (*s.labels)[i] << '\n';
    }
    out << '\n';
  }
}

std::vector<std::vector<std::string>> read_plain_text(std::istream& in) {
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = text::split_whitespace(line);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

}  // namespace nerkit
