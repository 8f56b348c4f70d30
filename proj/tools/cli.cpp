#include "nerkit/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <regex>
#include <sstream>

#include <omp.h>

#include "nerkit/corpus.hpp"
#include "nerkit/distrib.hpp"
#include "nerkit/eval.hpp"
#include "nerkit/features.hpp"
#include "nerkit/gazetteer.hpp"
#include "nerkit/inference.hpp"
#include "nerkit/learner.hpp"
#include "nerkit/log.hpp"
#include "nerkit/model.hpp"
#include "nerkit/text.hpp"

namespace nerkit {
namespace {

namespace fs = std::filesystem;

class UserError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Output goes to a sibling temporary that is renamed over the target on
// commit; an uncommitted file is removed.
class AtomicFile {
 public:
  explicit AtomicFile(std::string path)
      : path_(std::move(path)), tmp_(path_ + ".tmp." + std::to_string(::getpid())) {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw UserError("cannot write " + path_);
  }
  AtomicFile(const AtomicFile&) = delete;
  ~AtomicFile() {
    if (committed_) return;
    out_.close();
    std::error_code ec;
    fs::remove(tmp_, ec);
  }

  std::ostream& stream() { return out_; }

  void commit() {
    out_.flush();
    if (!out_) throw UserError("write failed: " + path_);
    out_.close();
    fs::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

void require_file(const std::string& path, const std::string& what) {
  if (!fs::is_regular_file(path)) throw UserError(what + " not found: " + path);
}

std::ifstream open_input(const std::string& path, const std::string& what) {
  require_file(path, what);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot read " + what + ": " + path);
  return in;
}

std::string absolute(const std::string& path) { return fs::absolute(path).lexically_normal().string(); }

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : text::split(s, ',')) {
    auto t = std::string(text::trim(part));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

struct TrainFile {
  std::string path;
  std::optional<std::string> epoch;
};

// `path:epoch`. A colon inside an existing file name is left alone.
TrainFile parse_train_arg(const std::string& arg) {
  const auto pos = arg.rfind(':');
  if (pos == std::string::npos || pos + 1 == arg.size() || fs::exists(arg) ||
      arg.find('/', pos) != std::string::npos)
    return {arg, std::nullopt};
  return {arg.substr(0, pos), arg.substr(pos + 1)};
}

Sentence collapse_types(Sentence s) {
  if (s.labels)
    for (auto& label : *s.labels) {
      auto [tag, type] = split_label(label);
      if (tag != 'O') label = std::string(1, tag) + "-" + kNoTypesName;
    }
  return s;
}

// Entity types named in the last column of a labelled file, in first-seen
// order.
std::vector<std::string> scan_types(const std::string& path) {
  auto in = open_input(path, "corpus");
  std::vector<std::string> types;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    auto cols = text::split(line, '\t');
    auto [tag, type] = split_label(cols.back());
    if ((tag == 'B' || tag == 'I') && !type.empty() &&
        std::find(types.begin(), types.end(), type) == types.end())
      types.push_back(type);
  }
  return types;
}

struct LoadedResources {
  std::optional<ClusterModel> clusters;
  std::optional<TermFrequencyModel> term_freq;
  std::optional<GazetteerCatalog> gazetteers;

  FeatureResources view() const {
    FeatureResources r;
    if (clusters) r.clusters = &*clusters;
    if (term_freq) r.term_freq = &*term_freq;
    if (gazetteers) r.gazetteers = &*gazetteers;
    return r;
  }
};

LoadedResources load_resources(const std::string& clusters, const std::string& term_freq,
                               const std::string& gazetteers) {
  LoadedResources r;
  if (!clusters.empty()) {
    auto in = open_input(clusters, "cluster file");
    r.clusters = ClusterModel::read(in);
  }
  if (!term_freq.empty()) {
    auto in = open_input(term_freq, "term-frequency file");
    r.term_freq = TermFrequencyModel::read(in);
  }
  if (!gazetteers.empty()) {
    require_file(gazetteers, "gazetteer manifest");
    r.gazetteers = GazetteerCatalog::load_manifest(gazetteers);
  }
  return r;
}

// --- cluster -------------------------------------------------------------

struct ClusterArgs {
  std::string input;
  std::string format = "text";
  std::size_t classes = 2000;
  std::size_t min_count = 1;
  std::string out;
  std::string termfreq_out;
  std::size_t termfreq_cutoff = kDefaultTermFreqCutoff;
};

TokenCorpus read_cluster_input(const std::string& path, const std::string& format) {
  auto in = open_input(path, "input");
  if (format == "text") return read_plain_text(in);
  TokenCorpus corpus;
  std::vector<std::string> cur;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) {
      if (!cur.empty()) corpus.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(text::split(line, '\t').front());
  }
  if (!cur.empty()) corpus.push_back(std::move(cur));
  return corpus;
}

int cmd_cluster(const ClusterArgs& a, std::ostream& out) {
  ClusterConfig cfg;
  cfg.num_classes = a.classes;
  cfg.min_count = a.min_count;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  const auto corpus = read_cluster_input(a.input, a.format);
  const auto model = train_brown(corpus, cfg);
  const auto tf = build_term_freq(corpus, a.termfreq_cutoff);

  const std::string tf_path = a.termfreq_out.empty() ? a.out + ".termfreq" : a.termfreq_out;
  AtomicFile paths_file(a.out);
  model.write(paths_file.stream());
  AtomicFile tf_file(tf_path);
  tf.write(tf_file.stream());
  paths_file.commit();
  tf_file.commit();
  out << "classes=" << model.leaf_class_count() << " vocabulary=" << model.vocabulary_size()
      << '\n';
  return 0;
}

// --- train ---------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> train;
  std::string learner = "crf-lbfgs";
  std::string types;
  bool notypes = false;
  std::string clusters;
  std::string term_freq;
  std::string gazetteers;
  double old_weight = 0.7;
  std::string new_epochs;
  std::string model_out;
  bool unknown_as_o = false;
  bool repair = false;
  std::string feature_dump;
  LearnerConfig learner_cfg;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
  const LearnerKind kind = [&] {
    try {
      return parse_learner(a.learner);
    } catch (const std::invalid_argument& e) {
      throw UserError(e.what());
    }
  }();
  const LabelScheme read_scheme = a.types.empty() ? LabelScheme::wnut() : LabelScheme(split_csv(a.types));
  const LabelScheme scheme = a.notypes ? LabelScheme::single(kNoTypesName) : read_scheme;

  std::vector<TrainFile> files;
  for (const auto& arg : a.train) files.push_back(parse_train_arg(arg));
  std::vector<std::string> epochs_seen;
  std::vector<Sentence> sentences;
  bool any_pos = false;
  for (const auto& f : files) {
    require_file(f.path, "training file");
    const auto cols = sniff_columns(f.path);
    if (cols == 0) {
      warn("training file " + f.path + " is empty");
      continue;
    }
    if (cols != 2 && cols != 3)
      throw UserError(f.path + ": expected token[<TAB>pos]<TAB>label columns, found " +
                      std::to_string(cols));
    ReadOptions opts;
    opts.pos_column = cols == 3;
    opts.unknown_as_outside = a.unknown_as_o;
    opts.repair = a.repair;
    any_pos = any_pos || opts.pos_column;
    auto part = read_conll_file(f.path, read_scheme, opts);
    for (auto& s : part) {
      s.epoch = f.epoch;
      sentences.push_back(a.notypes ? collapse_types(std::move(s)) : std::move(s));
    }
    if (f.epoch) epochs_seen.push_back(*f.epoch);
  }
  if (sentences.empty()) throw UserError("no training sentences");

  FeatureConfig fcfg;
  fcfg.old_epoch_weight = a.old_weight;
  for (const auto& e : split_csv(a.new_epochs)) fcfg.new_epochs.insert(e);
  for (const auto& e : fcfg.new_epochs)
    if (std::find(epochs_seen.begin(), epochs_seen.end(), e) == epochs_seen.end())
      warn("new epoch '" + e + "' is not attached to any training file");
  fcfg.use_clusters = !a.clusters.empty();
  fcfg.use_term_freq = !a.term_freq.empty();
  fcfg.use_gazetteers = !a.gazetteers.empty();
  try {
    fcfg.validate();
    a.learner_cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UserError(e.what());
  }
  if (!a.model_out.empty() && fs::is_directory(a.model_out))
    throw UserError("model output is a directory: " + a.model_out);

  const auto res = load_resources(a.clusters, a.term_freq, a.gazetteers);
  auto features = extract_corpus(sentences, res.view(), fcfg, true);

  if (!a.feature_dump.empty()) {
    AtomicFile dump(a.feature_dump);
    write_feature_dump(sentences, features, dump.stream());
    dump.commit();
  }

  std::vector<LabeledSequence> data;
  data.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i)
    data.push_back({std::move(features[i]), *sentences[i].labels});

  TrainReport report;
  SequenceModel model = train(kind, scheme, data, a.learner_cfg, &report);

  auto& meta = model.metadata();
  for (const auto& [k, v] : fcfg.to_kv()) meta["feature." + k] = v;
  meta["input.pos_column"] = any_pos ? "1" : "0";
  if (!a.clusters.empty()) meta["resource.clusters"] = absolute(a.clusters);
  if (!a.term_freq.empty()) meta["resource.termfreq"] = absolute(a.term_freq);
  if (!a.gazetteers.empty()) meta["resource.gazetteers"] = absolute(a.gazetteers);
  meta["train.sentences"] = std::to_string(sentences.size());
  meta["train.seed"] = std::to_string(a.learner_cfg.seed);

  if (!a.model_out.empty()) {
    AtomicFile file(a.model_out);
    model.save(file.stream());
    file.commit();
  }

  out << "learner=" << to_string(kind) << " sentences=" << sentences.size()
      << " features=" << model.num_features() << '\n';
  if (kind == LearnerKind::crf_lbfgs) {
    out << "objective=" << text::format_real(report.objective)
        << " iterations=" << report.iterations << " converged=" << (report.converged ? 1 : 0)
        << '\n';
  } else {
    for (std::size_t e = 0; e < report.mistakes.size(); ++e)
      out << "epoch=" << e + 1 << " mistakes=" << report.mistakes[e] << '\n';
    out << "updates=" << report.updates << '\n';
  }
  return 0;
}

// --- tag -----------------------------------------------------------------

struct TagArgs {
  std::string model;
  std::string input;
  std::string out = "-";
  bool constrain_bio = false;
  std::string clusters;
  std::string term_freq;
  std::string gazetteers;
};

std::optional<std::string> meta_value(const SequenceModel& m, const std::string& key) {
  auto it = m.metadata().find(key);
  if (it == m.metadata().end()) return std::nullopt;
  return it->second;
}

int cmd_tag(const TagArgs& a, std::ostream& out) {
  SequenceModel model = [&] {
    auto in = open_input(a.model, "model");
    return SequenceModel::load(in);
  }();

  std::map<std::string, std::string> fkv;
  for (const auto& [k, v] : model.metadata())
    if (k.rfind("feature.", 0) == 0) fkv[k.substr(8)] = v;
  const FeatureConfig fcfg = FeatureConfig::from_kv(fkv);

  auto resource_path = [&](const std::string& flag, const char* key, bool used) {
    if (!used) return std::string();
    if (!flag.empty()) return flag;
    if (auto p = meta_value(model, key)) return *p;
    throw UserError(std::string("model needs a resource that was not given: ") + key);
  };
  const auto res = load_resources(resource_path(a.clusters, "resource.clusters", fcfg.use_clusters),
                                  resource_path(a.term_freq, "resource.termfreq", fcfg.use_term_freq),
                                  resource_path(a.gazetteers, "resource.gazetteers", fcfg.use_gazetteers));

  require_file(a.input, "input");
  const bool model_pos = meta_value(model, "input.pos_column").value_or("0") == "1";
  const auto cols = sniff_columns(a.input);
  std::vector<Sentence> sentences;
  if (cols > 0) {
    ReadOptions opts;
    opts.labels = LabelColumn::absent;
    if (cols == 1) {
      if (model_pos) warn("model was trained with a POS column; input has none");
    } else if (cols == 2) {
      if (model_pos) {
        opts.pos_column = true;
      } else {
        opts.labels = LabelColumn::ignored;
      }
    } else if (cols == 3) {
      opts.pos_column = true;
      opts.labels = LabelColumn::ignored;
    } else {
      throw UserError(a.input + ": too many columns (" + std::to_string(cols) + ")");
    }
    if (opts.labels == LabelColumn::ignored)
      warn("input has a label column; it is ignored when tagging");
    sentences = read_conll_file(a.input, model.scheme(), opts);
  }

  DecodeOptions dopts;
  dopts.constrain_bio = a.constrain_bio;
  const auto features = extract_corpus(sentences, res.view(), fcfg, false);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto labels = decode(model, features[i], dopts);
    sentences[i].labels = is_valid_bio(labels) ? std::move(labels) : repair_bio(labels);
  }

  if (a.out == "-") {
    write_conll(sentences, out);
  } else {
    AtomicFile file(a.out);
    write_conll(sentences, file.stream());
    file.commit();
  }
  return 0;
}

// --- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string gold;
  std::string pred;
  bool notypes = false;
  bool kv = false;
};

std::vector<Sentence> read_labelled(const std::string& path, const LabelScheme& scheme) {
  const auto cols = sniff_columns(path);
  if (cols == 0) return {};
  if (cols != 2 && cols != 3)
    throw UserError(path + ": expected token[<TAB>pos]<TAB>label columns, found " +
                    std::to_string(cols));
  ReadOptions opts;
  opts.pos_column = cols == 3;
  return read_conll_file(path, scheme, opts);
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  require_file(a.gold, "gold file");
  require_file(a.pred, "prediction file");
  auto types = scan_types(a.gold);
  for (const auto& t : scan_types(a.pred))
    if (std::find(types.begin(), types.end(), t) == types.end()) types.push_back(t);
  const LabelScheme scheme = types.empty() ? LabelScheme::single() : LabelScheme(types);

  const auto gold = read_labelled(a.gold, scheme);
  const auto pred = read_labelled(a.pred, scheme);
  auto gold_types = scan_types(a.gold);
  std::sort(gold_types.begin(), gold_types.end());

  const auto typed = score(gold, pred, EvalMode::typed, gold_types);
  std::optional<EvalReport> untyped;
  if (a.notypes) untyped = score(gold, pred, EvalMode::notypes);
  const EvalReport* second = untyped ? &*untyped : nullptr;
  out << (a.kv ? render_kv(typed, second) : render_table(typed, second));
  return 0;
}

// --- inspect -------------------------------------------------------------

struct InspectArgs {
  std::string model;
  std::size_t top = 20;
  std::vector<std::string> filters;
  bool cluster_features = false;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out) {
  SequenceModel model = [&] {
    auto in = open_input(a.model, "model");
    return SequenceModel::load(in);
  }();
  std::vector<TopFeature> rows;
  if (a.cluster_features) {
    // "p" alone would also catch pref= and pos=; keep only p<depth>x<bits>.
    static const std::regex cluster_name("^(prev_)?p[0-9]+x[01]*$");
    for (auto& f : model.top_features(std::numeric_limits<std::size_t>::max(), {"p", "prev_p"})) {
      if (rows.size() == a.top) break;
      if (std::regex_match(f.name, cluster_name)) rows.push_back(std::move(f));
    }
  } else {
    rows = model.top_features(a.top, a.filters);
  }
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.weight);
    out << r.name << '\t' << r.label << '\t' << buf << '\n';
  }
  return 0;
}

// Splices `key=value` lines from a subcommand's --config file into the
// argument list. Keys may carry a "<subcommand>." prefix; a key whose flag
// already appears on the command line is skipped, so explicit flags win.
std::vector<std::string> expand_config(CLI::App& app, const std::vector<std::string>& args) {
  std::size_t sub_pos = args.size();
  CLI::App* sub = nullptr;
  for (std::size_t i = 0; i < args.size(); ++i)
    if ((sub = app.get_subcommand_no_throw(args[i])) != nullptr) {
      sub_pos = i;
      break;
    }
  if (!sub) return args;

  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = sub_pos + 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return args;

  auto given = [&](const std::string& flag) {
    return std::any_of(rest.begin(), rest.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  auto in = open_input(path, "config file");
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string_view::npos)
      throw UserError(path + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key(text::trim(trimmed.substr(0, eq)));
    const std::string value(text::trim(trimmed.substr(eq + 1)));
    const std::string prefix = sub->get_name() + ".";
    if (key.rfind(prefix, 0) == 0) key = key.substr(prefix.size());
    std::replace(key.begin(), key.end(), '_', '-');
    const std::string flag = "--" + key;
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    if (!opt || key == "config")
      throw UserError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    if (given(flag)) continue;
    if (opt->get_items_expected_max() == 0) {
      if (value == "1" || value == "true" || value == "yes") injected.push_back(flag);
      else if (value != "0" && value != "false" && value != "no")
        throw UserError(path + ":" + std::to_string(line_no) + ": '" + key + "' takes a boolean");
    } else {
      injected.push_back(flag);
      injected.push_back(value);
    }
  }

  std::vector<std::string> out(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(sub_pos) + 1);
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

class WarningsTo {
 public:
  explicit WarningsTo(std::ostream& err)
      : previous_(set_warning_sink([&err](const std::string& m) { err << "warning: " << m << '\n'; })) {}
  ~WarningsTo() { set_warning_sink(std::move(previous_)); }

 private:
  WarningSink previous_;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  WarningsTo sink(err);

  CLI::App app{"Named entity recognition toolkit for noisy text", "nerkit"};
  app.require_subcommand(1);
  int threads = 0;
  std::string config_path;  // consumed by expand_config before parsing
  app.add_option("--threads", threads, "OpenMP threads (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);

  ClusterArgs ca;
  auto* cluster = app.add_subcommand("cluster", "Build Brown clusters and term frequencies");
  cluster->add_option("--config", config_path, "key=value file; command-line flags win");
  cluster->add_option("--input", ca.input, "Corpus, one sentence per line")->required();
  cluster->add_option("--format", ca.format, "Input format")
      ->check(CLI::IsMember({"text", "conll"}))
      ->capture_default_str();
  cluster->add_option("--classes", ca.classes, "Number of leaf classes")->capture_default_str();
  cluster->add_option("--min-count", ca.min_count, "Drop rarer words")->capture_default_str();
  cluster->add_option("--out", ca.out, "Paths file")->required();
  cluster->add_option("--termfreq-out", ca.termfreq_out,
                      "Term-frequency file (default: <out>.termfreq)");
  cluster->add_option("--termfreq-cutoff", ca.termfreq_cutoff, "Keep this many most frequent words")
      ->capture_default_str();

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Train a tagger");
  trainc->add_option("--config", config_path, "key=value file; command-line flags win");
  trainc->add_option("--train", ta.train, "Training file, optionally tagged path:epoch (repeatable)")
      ->required();
  trainc->add_option("--learner", ta.learner, "crf-lbfgs, crf-pa or perceptron")
      ->check(CLI::IsMember({"crf-lbfgs", "crf-pa", "perceptron"}))
      ->capture_default_str();
  trainc->add_option("--types", ta.types, "Comma-separated entity types (default: the ten-type set)");
  trainc->add_flag("--notypes", ta.notypes, "Collapse all entity types into one");
  trainc->add_option("--clusters", ta.clusters, "Brown paths file");
  trainc->add_option("--termfreq", ta.term_freq, "Term-frequency file");
  trainc->add_option("--gazetteers", ta.gazetteers, "Gazetteer manifest");
  trainc->add_option("--old-weight", ta.old_weight, "Feature scale for old-epoch sentences")
      ->capture_default_str();
  trainc->add_option("--new-epochs", ta.new_epochs, "Comma-separated epochs that are not scaled");
  trainc->add_option("--model-out", ta.model_out, "Model file");
  trainc->add_flag("--unknown-as-o", ta.unknown_as_o, "Read unknown labels as O");
  trainc->add_flag("--repair", ta.repair, "Repair invalid I- labels instead of failing");
  trainc->add_option("--feature-dump", ta.feature_dump, "Write extracted features here");
  trainc->add_option("--l2-sigma2", ta.learner_cfg.l2_sigma2, "Gaussian prior variance")
      ->capture_default_str();
  trainc->add_option("--lbfgs-memory", ta.learner_cfg.lbfgs_memory, "L-BFGS history size")
      ->capture_default_str();
  trainc->add_option("--max-iterations", ta.learner_cfg.max_iterations, "L-BFGS iteration cap")
      ->capture_default_str();
  trainc->add_option("--grad-tolerance", ta.learner_cfg.grad_tolerance,
                     "L-BFGS relative gradient tolerance")
      ->capture_default_str();
  trainc->add_option("--pa-c", ta.learner_cfg.pa_c, "Passive-aggressive step cap")
      ->capture_default_str();
  trainc->add_option("--epochs", ta.learner_cfg.epochs, "Online learner epochs")
      ->capture_default_str();
  trainc->add_option("--seed", ta.learner_cfg.seed, "Shuffle seed")->capture_default_str();

  TagArgs ga;
  auto* tag = app.add_subcommand("tag", "Label a corpus with a trained model");
  tag->add_option("--config", config_path, "key=value file; command-line flags win");
  tag->add_option("--model", ga.model, "Model file")->required();
  tag->add_option("--input", ga.input, "CoNLL input (token[<TAB>pos])")->required();
  tag->add_option("--out", ga.out, "Output file, - for standard output")->capture_default_str();
  tag->add_flag("--constrain-bio", ga.constrain_bio, "Decode under hard BIO constraints");
  tag->add_option("--clusters", ga.clusters, "Override the model's paths file");
  tag->add_option("--termfreq", ga.term_freq, "Override the model's term-frequency file");
  tag->add_option("--gazetteers", ga.gazetteers, "Override the model's gazetteer manifest");

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Score predictions against gold labels");
  evalc->add_option("--config", config_path, "key=value file; command-line flags win");
  evalc->add_option("--gold", ea.gold, "Gold CoNLL file")->required();
  evalc->add_option("--pred", ea.pred, "Predicted CoNLL file")->required();
  evalc->add_flag("--notypes", ea.notypes, "Also score with all types collapsed");
  evalc->add_flag("--kv", ea.kv, "Print key=value lines instead of a table");

  InspectArgs ia;
  auto* inspect = app.add_subcommand("inspect", "List the largest model weights");
  inspect->add_option("--config", config_path, "key=value file; command-line flags win");
  inspect->add_option("--model", ia.model, "Model file")->required();
  inspect->add_option("--top", ia.top, "Number of rows")->capture_default_str();
  inspect->add_option("--filter", ia.filters, "Feature-name prefix (repeatable)");
  inspect->add_flag("--cluster-features", ia.cluster_features, "Only Brown cluster features");

  try {
    const auto expanded = expand_config(app, args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  if (threads > 0) omp_set_num_threads(threads);
  try {
    if (cluster->parsed()) return cmd_cluster(ca, out);
    if (trainc->parsed()) return cmd_train(ta, out);
    if (tag->parsed()) return cmd_tag(ga, out);
    if (evalc->parsed()) return cmd_eval(ea, out);
    if (inspect->parsed()) return cmd_inspect(ia, out);
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
  err << "internal error: no subcommand ran\n";
  return 2;
}

}  // namespace nerkit
