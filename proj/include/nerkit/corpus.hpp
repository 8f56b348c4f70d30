#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nerkit {

/// Raised for malformed input data (bad columns, unknown labels, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Token {
  std::string text;
  std::optional<std::string> pos;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::vector<Token> tokens;
  std::optional<std::vector<std::string>> labels;
  double weight = 1.0;
  std::optional<std::string> epoch;

  std::size_t size() const { return tokens.size(); }
  std::vector<std::string> forms() const;
};

/// Entity types plus the derived BIO label alphabet. Label order is
/// O, B-t1, I-t1, B-t2, I-t2, ... and is significant: decoders break ties
/// in favour of earlier labels.
class LabelScheme {
 public:
  LabelScheme() = default;
  explicit LabelScheme(std::vector<std::string> types);

  /// The ten-type scheme used for noisy-text NER (company ... tvshow).
  static LabelScheme wnut();
  /// Single-type scheme for detection-only ("notypes") models.
  static LabelScheme single(std::string type = "entity");

  const std::vector<std::string>& types() const { return types_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }

  std::optional<std::size_t> index_of(std::string_view label) const;
  std::size_t index_or_throw(std::string_view label) const;
  bool has_type(std::string_view type) const;
  bool contains(std::string_view label) const { return index_of(label).has_value(); }

  bool operator==(const LabelScheme& o) const { return types_ == o.types_; }

 private:
  std::vector<std::string> types_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Splits "B-geo-loc" into ('B', "geo-loc"); "O" gives ('O', "").
std::pair<char, std::string> split_label(std::string_view label);

bool is_valid_bio(const std::vector<std::string>& labels);

/// Rewrites every I-t that does not continue a B-t/I-t run into B-t.
std::vector<std::string> repair_bio(const std::vector<std::string>& labels);

enum class LabelColumn {
  absent,     // token [pos]
  validated,  // token [pos] label, checked against the scheme
  ignored,    // token [pos] label, label column skipped
};

struct ReadOptions {
  LabelColumn labels = LabelColumn::validated;
  bool pos_column = false;
  bool unknown_as_outside = false;  // coerce unknown labels to O
  bool repair = false;              // repair invalid I- transitions
};

std::vector<Sentence> read_conll(std::istream& in, const LabelScheme& scheme,
                                 const ReadOptions& opts = {});
std::vector<Sentence> read_conll_file(const std::string& path, const LabelScheme& scheme,
                                      const ReadOptions& opts = {});

/// Number of tab-separated columns on the first non-blank line, or 0.
std::size_t sniff_columns(const std::string& path);

/// Writes token [pos] label lines; the POS column is written when any token
/// carries a tag, in which case every token must.
void write_conll(const std::vector<Sentence>& sentences, std::ostream& out);

/// One sentence per line, whitespace-separated tokens (clustering input).
std::vector<std::vector<std::string>> read_plain_text(std::istream& in);

}  // namespace nerkit
