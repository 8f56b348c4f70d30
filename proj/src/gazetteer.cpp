#include "nerkit/gazetteer.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "nerkit/corpus.hpp"
#include "nerkit/log.hpp"
#include "nerkit/text.hpp"

namespace nerkit {

std::vector<GazetteerEntry> load_gazetteer(std::istream& in, const std::string& source, bool alias) {
  std::set<GazetteerEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = text::split_whitespace(text::fold_case(line));
    if (toks.empty()) continue;
    entries.insert(GazetteerEntry{std::move(toks), source, alias});
  }
  if (entries.empty()) warn("gazetteer '" + source + "' has no entries");
  return {entries.begin(), entries.end()};
}

std::string GazetteerCatalog::feature_source(const GazetteerEntry& entry) {
  auto name = text::sanitize_name(entry.source);
  if (entry.alias) name += "_alias";
  return name;
}

void GazetteerCatalog::add(const GazetteerEntry& entry) {
  if (entry.tokens.empty()) return;
  auto& trie = tries_[feature_source(entry)];
  std::uint32_t node = 0;
  for (const auto& raw : entry.tokens) {
    auto tok = text::fold_case(raw);
    auto it = trie.nodes[node].children.find(tok);
    if (it == trie.nodes[node].children.end()) {
      const auto next = static_cast<std::uint32_t>(trie.nodes.size());
      trie.nodes[node].children.emplace(tok, next);
      trie.nodes.emplace_back();
      node = next;
    } else {
      node = it->second;
    }
  }
  if (!trie.nodes[node].terminal) {
    trie.nodes[node].terminal = true;
    ++trie.entries;
  }
}

void GazetteerCatalog::add_all(const std::vector<GazetteerEntry>& entries) {
  for (const auto& e : entries) add(e);
}

void GazetteerCatalog::set_type(const std::string& source, std::optional<std::string> ne_type) {
  type_map_[source] = std::move(ne_type);
}

std::optional<std::string> GazetteerCatalog::type_of(const std::string& source) const {
  auto it = type_map_.find(source);
  if (it == type_map_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> GazetteerCatalog::sources() const {
  std::vector<std::string> out;
  for (const auto& [name, trie] : tries_) out.push_back(name);
  return out;
}

std::size_t GazetteerCatalog::entry_count() const {
  std::size_t n = 0;
  for (const auto& [name, trie] : tries_) n += trie.entries;
  return n;
}

std::vector<std::vector<std::string>> GazetteerCatalog::match(
    const std::vector<std::string>& tokens) const {
  std::vector<std::vector<std::string>> out(tokens.size());
  if (tries_.empty()) return out;
  std::vector<std::string> folded;
  folded.reserve(tokens.size());
  for (const auto& t : tokens) folded.push_back(text::fold_case(t));

  for (const auto& [name, trie] : tries_) {
    const std::string feature = "in_gaz=" + name;
    std::size_t i = 0;
    while (i < folded.size()) {
      std::uint32_t node = 0;
      std::size_t longest_end = i;
      for (std::size_t j = i; j < folded.size(); ++j) {
        auto it = trie.nodes[node].children.find(folded[j]);
        if (it == trie.nodes[node].children.end()) break;
        node = it->second;
        if (trie.nodes[node].terminal) longest_end = j + 1;
      }
      if (longest_end > i) {
        for (std::size_t k = i; k < longest_end; ++k) out[k].push_back(feature);
        i = longest_end;
      } else {
        ++i;
      }
    }
  }
  // Sources iterate in sorted order, so each list is already sorted.
  return out;
}

namespace {

bool parse_alias_flag(const std::string& v, const std::string& where) {
  const auto f = text::fold_case(v);
  if (f == "alias" || f == "1" || f == "true" || f == "yes") return true;
  if (f == "name" || f == "0" || f == "false" || f == "no") return false;
  throw DataError(where + "alias column must be alias/name, yes/no, true/false or 1/0");
}

}  // namespace

GazetteerCatalog GazetteerCatalog::load_manifest(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw DataError("cannot open gazetteer manifest '" + manifest_path + "'");
  const auto base = std::filesystem::path(manifest_path).parent_path();

  GazetteerCatalog catalog;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    const auto where = manifest_path + " line " + std::to_string(line_no) + ": ";
    auto cols = text::split(line, '\t');
    if (cols.size() != 4) throw DataError(where + "expected source, path, alias?, ne_type");
    const auto& source = cols[0];
    if (source.empty()) throw DataError(where + "empty source name");
    auto path = std::filesystem::path(cols[1]);
    if (path.is_relative()) path = base / path;
    const bool alias = parse_alias_flag(cols[2], where);

    std::ifstream list(path);
    if (!list) throw DataError(where + "cannot open '" + path.string() + "'");
    auto entries = load_gazetteer(list, source, alias);
    catalog.add_all(entries);
    GazetteerEntry probe{{}, source, alias};
    std::optional<std::string> type;
    if (cols[3] != "-" && !cols[3].empty()) type = cols[3];
    catalog.set_type(feature_source(probe), type);
  }
  return catalog;
}

std::multimap<std::string, std::string> load_type_table(std::istream& in) {
  std::multimap<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || line[0] == '#') continue;
    auto cols = text::split(line, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty())
      throw DataError("type table line " + std::to_string(line_no) + ": expected ne_type<TAB>kb_type");
    out.emplace(cols[0], cols[1]);
  }
  return out;
}

}  // namespace nerkit
