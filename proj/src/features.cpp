#include "nerkit/features.hpp"

#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "nerkit/text.hpp"

namespace nerkit {

void FeatureVector::add(const std::string& name, double value) {
  if (value == 0.0) return;
  auto [it, inserted] = entries_.emplace(name, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0.0) entries_.erase(it);
  }
}

double FeatureVector::get(const std::string& name) const {
  auto it = entries_.find(name);
  return it == entries_.end() ? 0.0 : it->second;
}

void FeatureVector::scale(double factor) {
  if (factor == 0.0) {
    entries_.clear();
    return;
  }
  for (auto& [name, v] : entries_) v *= factor;
}

void FeatureConfig::validate() const {
  if (window_left > 0 || window_right < 0)
    throw std::invalid_argument("feature window must contain offset 0");
  for (int n : affix_lengths)
    if (n <= 0) throw std::invalid_argument("affix lengths must be positive");
  for (std::size_t i = 0; i < cluster_depths.size(); ++i) {
    if (cluster_depths[i] <= 0) throw std::invalid_argument("cluster depths must be positive");
    if (i > 0 && cluster_depths[i] <= cluster_depths[i - 1])
      throw std::invalid_argument("cluster depths must be strictly increasing");
  }
  if (!(old_epoch_weight > 0.0 && old_epoch_weight <= 1.0))
    throw std::invalid_argument("old-epoch weight must lie in (0, 1]");
}

namespace {

template <typename T>
std::string join(const T& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::string>)
      out += x;
    else
      out += std::to_string(x);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const auto& part : text::split(s, ',')) out.push_back(std::stoi(part));
  return out;
}

bool parse_bool(const std::string& s) { return s == "1" || s == "true"; }

}  // namespace

std::map<std::string, std::string> FeatureConfig::to_kv() const {
  return {
      {"window", std::to_string(window_left) + "," + std::to_string(window_right)},
      {"affix_lengths", join(affix_lengths)},
      {"cluster_depths", join(cluster_depths)},
      {"use_pos", use_pos ? "1" : "0"},
      {"use_clusters", use_clusters ? "1" : "0"},
      {"use_term_freq", use_term_freq ? "1" : "0"},
      {"use_gazetteers", use_gazetteers ? "1" : "0"},
      {"old_epoch_weight", text::format_real(old_epoch_weight)},
      {"new_epochs", join(new_epochs)},
  };
}

FeatureConfig FeatureConfig::from_kv(const std::map<std::string, std::string>& kv) {
  FeatureConfig c;
  auto get = [&](const char* key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  try {
    if (auto v = get("window")) {
      auto w = parse_ints(*v);
      if (w.size() != 2) throw std::invalid_argument("window needs two offsets");
      c.window_left = w[0];
      c.window_right = w[1];
    }
    if (auto v = get("affix_lengths")) c.affix_lengths = parse_ints(*v);
    if (auto v = get("cluster_depths")) c.cluster_depths = parse_ints(*v);
    if (auto v = get("use_pos")) c.use_pos = parse_bool(*v);
    if (auto v = get("use_clusters")) c.use_clusters = parse_bool(*v);
    if (auto v = get("use_term_freq")) c.use_term_freq = parse_bool(*v);
    if (auto v = get("use_gazetteers")) c.use_gazetteers = parse_bool(*v);
    if (auto v = get("old_epoch_weight")) c.old_epoch_weight = std::stod(*v);
    if (auto v = get("new_epochs")) {
      c.new_epochs.clear();
      if (!v->empty())
        for (auto& e : text::split(*v, ',')) c.new_epochs.insert(e);
    }
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("bad feature configuration: ") + e.what());
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("bad feature configuration: ") + e.what());
  }
  c.validate();
  return c;
}

std::string shape(std::string_view word) {
  std::string out;
  out.reserve(word.size());
  for (char32_t cp : text::decode_utf8(word)) {
    if (text::is_upper(cp))
      out.push_back('X');
    else if (text::is_lower(cp))
      out.push_back('x');
    else if (text::is_digit(cp))
      out.push_back('0');
    else
      text::append_utf8(out, cp);
  }
  return out;
}

std::string collapse_runs(std::string_view s) {
  auto cps = text::decode_utf8(s);
  std::vector<char32_t> out;
  for (char32_t cp : cps)
    if (out.empty() || out.back() != cp) out.push_back(cp);
  return text::encode_utf8(out);
}

std::string shape_short(std::string_view word) { return collapse_runs(shape(word)); }

namespace {

std::string offset_name(int k) { return "w[" + std::to_string(k) + "]"; }

}  // namespace

std::vector<FeatureVector> extract(const Sentence& sentence, const FeatureResources& resources,
                                   const FeatureConfig& config) {
  if (config.use_clusters && !resources.clusters)
    throw std::invalid_argument("missing resource: cluster paths (disable clusters to proceed)");
  if (config.use_term_freq && !resources.term_freq)
    throw std::invalid_argument(
        "missing resource: term-frequency model (disable term frequency to proceed)");
  if (config.use_gazetteers && !resources.gazetteers)
    throw std::invalid_argument("missing resource: gazetteer catalog (disable gazetteers to proceed)");

  const auto n = static_cast<int>(sentence.tokens.size());
  std::vector<std::string> forms;
  forms.reserve(n);
  for (const auto& t : sentence.tokens) forms.push_back(text::sanitize_name(t.text));
  auto form_at = [&](int i) -> const std::string& {
    static const std::string kStart = "<s>", kEnd = "</s>";
    if (i < 0) return kStart;
    if (i >= n) return kEnd;
    return forms[i];
  };

  std::vector<std::optional<std::string>> paths(n);
  if (config.use_clusters)
    for (int i = 0; i < n; ++i) paths[i] = resources.clusters->lookup_path(sentence.tokens[i].text);

  std::vector<std::vector<std::string>> gaz;
  if (config.use_gazetteers) gaz = resources.gazetteers->match(sentence.forms());

  std::vector<FeatureVector> out(n);
  for (int i = 0; i < n; ++i) {
    auto& fv = out[i];
    const auto& raw = sentence.tokens[i].text;
    fv.add("w=" + forms[i]);

    for (int k = config.window_left; k <= config.window_right; ++k)
      if (k != 0) fv.add(offset_name(k) + "=" + form_at(i + k));
    for (int k = config.window_left; k < config.window_right; ++k)
      fv.add(offset_name(k) + "|" + offset_name(k + 1) + "=" + form_at(i + k) + "|" +
             form_at(i + k + 1));

    fv.add("shape-" + text::sanitize_name(shape(raw)));
    fv.add("shapeshort-" + text::sanitize_name(shape_short(raw)));
    const auto len = text::codepoint_length(raw);
    fv.add("length-" + std::to_string(len));
    for (int a : config.affix_lengths) {
      if (static_cast<std::size_t>(a) > len) continue;
      fv.add("pref=" + text::sanitize_name(text::utf8_prefix(raw, a)));
      fv.add("suff=" + text::sanitize_name(text::utf8_suffix(raw, a)));
    }
    if (config.use_pos && sentence.tokens[i].pos && !sentence.tokens[i].pos->empty())
      fv.add("pos=" + text::sanitize_name(*sentence.tokens[i].pos));

    if (config.use_clusters) {
      for (int d : config.cluster_depths) {
        const auto depth = std::to_string(d);
        if (paths[i]) fv.add("p" + depth + "x" + bit_prefix(*paths[i], d));
        if (i > 0 && paths[i - 1]) fv.add("prev_p" + depth + "x" + bit_prefix(*paths[i - 1], d));
      }
    }
    if (config.use_term_freq)
      if (auto v = resources.term_freq->feature_value(raw)) fv.add("tf", *v);
    if (config.use_gazetteers)
      for (const auto& g : gaz[i]) fv.add(g);
  }
  return out;
}

double instance_scale(const Sentence& sentence, const FeatureConfig& config) {
  double scale = sentence.weight;
  if (sentence.epoch && !config.new_epochs.empty() && !config.new_epochs.count(*sentence.epoch))
    scale *= config.old_epoch_weight;
  return scale;
}

std::vector<FeatureVector> apply_epoch_weight(std::vector<FeatureVector> vectors,
                                              const Sentence& sentence,
                                              const FeatureConfig& config) {
  const double s = instance_scale(sentence, config);
  if (s != 1.0)
    for (auto& fv : vectors) fv.scale(s);
  return vectors;
}

std::vector<std::vector<FeatureVector>> extract_corpus(const std::vector<Sentence>& sentences,
                                                       const FeatureResources& resources,
                                                       const FeatureConfig& config,
                                                       bool training) {
  config.validate();
  std::vector<std::vector<FeatureVector>> out(sentences.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(sentences.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      auto fvs = extract(sentences[i], resources, config);
      out[i] = training ? apply_epoch_weight(std::move(fvs), sentences[i], config) : std::move(fvs);
    } catch (...) {
#pragma omp critical(nerkit_extract_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void write_feature_dump(const std::vector<Sentence>& sentences,
                        const std::vector<std::vector<FeatureVector>>& features,
                        std::ostream& out) {
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    const auto& sent = sentences[s];
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      out << sent.tokens[i].text << '\t' << (sent.labels ? (*sent.labels)[i] : "_") << '\t';
      bool first = true;
      for (const auto& [name, v] : features[s][i].entries()) {
        if (!first) out << ' ';
        first = false;
        out << name << '=' << text::format_real(v);
      }
      out << '\n';
    }
    out << '\n';
  }
}

}  // namespace nerkit
