#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nerkit {

struct GazetteerEntry {
  std::vector<std::string> tokens;  // case-folded
  std::string source;
  bool alias = false;

  auto operator<=>(const GazetteerEntry&) const = default;
  bool operator==(const GazetteerEntry&) const = default;
};

/// One entry per line; entries are whitespace-tokenised and case-folded,
/// duplicates collapse and blank lines are skipped. Warns on an empty list.
std::vector<GazetteerEntry> load_gazetteer(std::istream& in, const std::string& source, bool alias);

/// Case-insensitive longest-match lookup over several typed lists. Each
/// list ("source") has its own token trie; alias lists are kept apart from
/// name lists under the source name suffixed with "_alias".
class GazetteerCatalog {
 public:
  void add(const GazetteerEntry& entry);
  void add_all(const std::vector<GazetteerEntry>& entries);

  /// Declares the entity type of a source; nullopt marks it type-agnostic
  /// (e.g. trigger-word lists).
  void set_type(const std::string& source, std::optional<std::string> ne_type);
  std::optional<std::string> type_of(const std::string& source) const;

  /// Feature-source names in sorted order.
  std::vector<std::string> sources() const;
  std::size_t entry_count() const;

  /// Per token, the sorted list of `in_gaz=<source>` feature names. Within a
  /// source matching is greedy longest-match from left to right.
  std::vector<std::vector<std::string>> match(const std::vector<std::string>& tokens) const;

  /// Reads `source<TAB>path<TAB>alias?<TAB>ne_type` lines. Relative paths
  /// resolve against the manifest's directory; ne_type "-" means untyped.
  static GazetteerCatalog load_manifest(const std::string& manifest_path);

  static std::string feature_source(const GazetteerEntry& entry);

 private:
  struct Node {
    std::map<std::string, std::uint32_t> children;
    bool terminal = false;
  };
  struct Trie {
    std::vector<Node> nodes{Node{}};
    std::size_t entries = 0;
  };

  std::map<std::string, Trie> tries_;
  std::map<std::string, std::optional<std::string>> type_map_;
};

/// NE type -> knowledge-base types used to build each type's gazetteers
/// (`ne_type<TAB>kb_type` lines).
std::multimap<std::string, std::string> load_type_table(std::istream& in);

}  // namespace nerkit
