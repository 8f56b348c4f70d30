#include "nerkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "nerkit/text.hpp"

namespace nerkit {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::crf_lbfgs: return "crf-lbfgs";
    case LearnerKind::crf_pa: return "crf-pa";
    case LearnerKind::perceptron: return "perceptron";
  }
  return "?";
}

LearnerKind parse_learner(const std::string& name) {
  if (name == "crf-lbfgs") return LearnerKind::crf_lbfgs;
  if (name == "crf-pa") return LearnerKind::crf_pa;
  if (name == "perceptron") return LearnerKind::perceptron;
  throw std::invalid_argument("unknown learner '" + name + "' (crf-lbfgs, crf-pa, perceptron)");
}

SequenceModel::SequenceModel(LabelScheme scheme, LearnerKind learner)
    : scheme_(std::move(scheme)),
      learner_(learner),
      params_(parameter_count(scheme_.num_labels(), 0), 0.0) {}

std::optional<std::uint32_t> SequenceModel::feature_id(const std::string& name) const {
  auto it = feature_index_.find(name);
  if (it == feature_index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t SequenceModel::intern_feature(const std::string& name) {
  if (auto it = feature_index_.find(name); it != feature_index_.end()) return it->second;
  if (name.empty() || name.rfind("T:", 0) == 0 || name.find_first_of("\t\n\r") != std::string::npos)
    throw std::invalid_argument("feature name '" + name + "' is not allowed");
  auto [it, inserted] =
      feature_index_.emplace(name, static_cast<std::uint32_t>(feature_names_.size()));
  if (inserted) {
    feature_names_.push_back(name);
    params_.resize(parameter_count(num_labels(), feature_names_.size()), 0.0);
  }
  return it->second;
}

void SequenceModel::set_parameters(std::vector<double> params) {
  if (params.size() != parameter_count(num_labels(), num_features()))
    throw std::invalid_argument("parameter vector has the wrong size");
  params_ = std::move(params);
}

std::map<std::pair<std::string, std::string>, double> SequenceModel::weight_map() const {
  std::map<std::pair<std::string, std::string>, double> out;
  const auto v = view();
  const auto& labels = scheme_.labels();
  const auto L = num_labels();
  for (std::size_t from = 0; from <= L; ++from)
    for (std::size_t to = 0; to < L; ++to) {
      const double w = v.transition(from, to);
      if (w != 0.0) out[{"T:" + (from == L ? kStartLabel : labels[from]), labels[to]}] = w;
    }
  for (std::uint32_t f = 0; f < num_features(); ++f)
    for (std::size_t l = 0; l < L; ++l) {
      const double w = v.emission(f, l);
      if (w != 0.0) out[{feature_names_[f], labels[l]}] = w;
    }
  return out;
}

namespace {

template <typename Lookup>
Instance compile_with(const std::vector<FeatureVector>& features,
                      const std::vector<std::string>* labels, const LabelScheme& scheme,
                      Lookup&& lookup) {
  Instance inst;
  inst.offsets.reserve(features.size() + 1);
  for (const auto& fv : features) {
    for (const auto& [name, value] : fv.entries()) {
      if (!std::isfinite(value))
        throw std::invalid_argument("non-finite value for feature '" + name + "'");
      if (auto id = lookup(name)) {
        inst.ids.push_back(*id);
        inst.values.push_back(value);
      }
    }
    inst.offsets.push_back(static_cast<std::uint32_t>(inst.ids.size()));
  }
  if (labels) {
    if (labels->size() != features.size())
      throw std::invalid_argument("label sequence length differs from feature sequence length");
    inst.labels.reserve(labels->size());
    for (const auto& l : *labels) inst.labels.push_back(scheme.index_or_throw(l));
  }
  return inst;
}

}  // namespace

Instance SequenceModel::compile(const std::vector<FeatureVector>& features,
                                const std::vector<std::string>* labels, bool grow) {
  if (!grow) return std::as_const(*this).compile(features, labels);
  return compile_with(features, labels, scheme_,
                      [&](const std::string& n) -> std::optional<std::uint32_t> {
                        return intern_feature(n);
                      });
}

Instance SequenceModel::compile(const std::vector<FeatureVector>& features,
                                const std::vector<std::string>* labels) const {
  return compile_with(features, labels, scheme_,
                      [&](const std::string& n) { return feature_id(n); });
}

void SequenceModel::save(std::ostream& out) const {
  for (const auto& t : scheme_.types())
    if (t.find(',') != std::string::npos)
      throw std::invalid_argument("entity type names may not contain commas");
  out << "#nerkit-model\n";
  out << "#version=" << kFormatVersion << '\n';
  out << "#learner=" << to_string(learner_) << '\n';
  std::string types;
  for (const auto& t : scheme_.types()) types += (types.empty() ? "" : ",") + t;
  out << "#types=" << types << '\n';
  for (const auto& [k, v] : metadata_) {
    if (k.find_first_of("=\t\n") != std::string::npos || v.find_first_of("\t\n") != std::string::npos)
      throw std::invalid_argument("metadata key/value not serialisable: " + k);
    out << "#meta." << k << '=' << v << '\n';
  }

  const auto v = view();
  const auto& labels = scheme_.labels();
  const auto L = num_labels();
  for (std::size_t from = 0; from <= L; ++from)
    for (std::size_t to = 0; to < L; ++to) {
      const double w = v.transition(from, to);
      if (w != 0.0)
        out << "T:" << (from == L ? kStartLabel : labels[from]) << '\t' << labels[to] << '\t'
            << text::format_real(w) << '\n';
    }
  std::vector<std::uint32_t> order(num_features());
  for (std::uint32_t f = 0; f < order.size(); ++f) order[f] = f;
  std::sort(order.begin(), order.end(),
            [&](auto a, auto b) { return feature_names_[a] < feature_names_[b]; });
  for (auto f : order)
    for (std::size_t l = 0; l < L; ++l) {
      const double w = v.emission(f, l);
      if (w != 0.0)
        out << feature_names_[f] << '\t' << labels[l] << '\t' << text::format_real(w) << '\n';
    }
}

SequenceModel SequenceModel::load(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) -> DataError {
    return DataError("model line " + std::to_string(line_no) + ": " + msg);
  };

  std::optional<int> version;
  std::optional<LearnerKind> learner;
  std::optional<std::vector<std::string>> types;
  std::map<std::string, std::string> meta;
  struct Row {
    std::string feature, label;
    double weight;
    std::size_t line;
  };
  std::vector<Row> rows;
  bool magic = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#' && rows.empty() && line.find('\t') == std::string::npos) {
      if (line == "#nerkit-model") {
        magic = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw fail("malformed header line");
      const auto key = line.substr(1, eq - 1);
      const auto value = line.substr(eq + 1);
      if (key == "version") {
        try {
          version = std::stoi(value);
        } catch (const std::exception&) {
          throw fail("bad version");
        }
        if (*version != kFormatVersion)
          throw fail("unsupported model format version " + value + " (expected " +
                     std::to_string(kFormatVersion) + ")");
      } else if (key == "learner") {
        try {
          learner = parse_learner(value);
        } catch (const std::invalid_argument& e) {
          throw fail(e.what());
        }
      } else if (key == "types") {
        types = text::split(value, ',');
      } else if (key.rfind("meta.", 0) == 0) {
        meta[key.substr(5)] = value;
      } else {
        throw fail("unknown header key '" + key + "'");
      }
      continue;
    }
    auto cols = text::split(line, '\t');
    if (cols.size() != 3) throw fail("expected feature<TAB>label<TAB>weight");
    double w = 0.0;
    try {
      std::size_t used = 0;
      w = std::stod(cols[2], &used);
      if (used != cols[2].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw fail("weight is not a number");
    }
    if (!std::isfinite(w)) throw fail("non-finite weight");
    rows.push_back({cols[0], cols[1], w, line_no});
  }
  if (!magic) throw DataError("not a model file (missing #nerkit-model header)");
  if (!version) throw DataError("model file lacks a version header");
  if (!learner || !types) throw DataError("model file lacks learner or types header");

  SequenceModel model(LabelScheme(*types), *learner);
  model.metadata_ = std::move(meta);
  const auto L = model.num_labels();
  for (const auto& r : rows) {
    line_no = r.line;
    if (r.feature.rfind("T:", 0) == 0) continue;
    model.intern_feature(r.feature);
  }
  auto& p = model.params_;
  const auto v = model.view();
  for (const auto& r : rows) {
    line_no = r.line;
    auto to = model.scheme_.index_of(r.label);
    if (!to) throw fail("label '" + r.label + "' is not in the model's scheme");
    if (r.feature.rfind("T:", 0) == 0) {
      const auto from_name = r.feature.substr(2);
      std::size_t from = L;
      if (from_name != kStartLabel) {
        auto idx = model.scheme_.index_of(from_name);
        if (!idx) throw fail("transition from unknown label '" + from_name + "'");
        from = *idx;
      }
      p[v.transition_index(from, *to)] = r.weight;
    } else {
      p[v.emission_index(*model.feature_id(r.feature), *to)] = r.weight;
    }
  }
  return model;
}

std::vector<TopFeature> SequenceModel::top_features(std::size_t k,
                                                    const std::vector<std::string>& prefixes) const {
  if (k == 0) return {};
  struct Entry {
    const std::string* name;
    std::string transition_name;
    std::size_t label;
    double weight;
  };
  std::vector<Entry> all;
  const auto v = view();
  const auto L = num_labels();
  const auto& labels = scheme_.labels();
  if (prefixes.empty()) {
    for (std::size_t from = 0; from <= L; ++from)
      for (std::size_t to = 0; to < L; ++to)
        if (double w = v.transition(from, to); w != 0.0)
          all.push_back({nullptr, "T:" + (from == L ? kStartLabel : labels[from]), to, w});
  }
  for (std::uint32_t f = 0; f < num_features(); ++f) {
    const auto& name = feature_names_[f];
    if (!prefixes.empty() &&
        std::none_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return name.rfind(p, 0) == 0; }))
      continue;
    for (std::size_t l = 0; l < L; ++l)
      if (double w = v.emission(f, l); w != 0.0) all.push_back({&name, {}, l, w});
  }
  auto name_of = [](const Entry& e) -> const std::string& {
    return e.name ? *e.name : e.transition_name;
  };
  std::sort(all.begin(), all.end(), [&](const Entry& a, const Entry& b) {
    if (std::abs(a.weight) != std::abs(b.weight)) return std::abs(a.weight) > std::abs(b.weight);
    if (name_of(a) != name_of(b)) return name_of(a) < name_of(b);
    return a.label < b.label;
  });
  if (all.size() > k) all.resize(k);
  std::vector<TopFeature> out;
  out.reserve(all.size());
  for (const auto& e : all) out.push_back({name_of(e), labels[e.label], e.weight});
  return out;
}

bool same_weights(const SequenceModel& a, const SequenceModel& b) {
  return a.scheme() == b.scheme() && a.learner() == b.learner() && a.weight_map() == b.weight_map();
}

}  // namespace nerkit
