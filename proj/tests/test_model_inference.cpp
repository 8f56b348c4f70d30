#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "nerkit/inference.hpp"
#include "nerkit/model.hpp"
#include "oracles.hpp"

using namespace nerkit;

namespace {

std::vector<FeatureVector> one_token(const std::string& name, double value) {
  FeatureVector fv;
  fv.add(name, value);
  return {fv};
}

WeightView view_of(const std::vector<double>& w, std::size_t L) { return {w, L}; }

// Random instance over L labels with transitions and emissions drawn at `scale`.
struct RandomCase {
  std::size_t L, F;
  Instance x;
  std::vector<double> w;
};

RandomCase random_case(std::mt19937_64& rng, double scale = 1.0) {
  RandomCase c;
  c.L = 2 + rng() % 3;
  c.F = 1 + rng() % 6;
  const std::size_t T = 1 + rng() % 5;
  c.x = oracle::random_instance(rng, T, c.L, c.F, 1 + rng() % 3);
  c.w = oracle::random_weights(rng, parameter_count(c.L, c.F), scale);
  return c;
}

// A scheme whose label count is L: one type gives 3 labels, two give 5.
// For L = 2 and 4 we only use the numeric kernels, which ignore the scheme
// unless decoding is constrained.
LabelScheme scheme_with_at_least(std::size_t L) {
  std::vector<std::string> types;
  for (std::size_t i = 0; 1 + 2 * types.size() < L; ++i) types.push_back("t" + std::to_string(i));
  if (types.empty()) types.push_back("t0");
  return LabelScheme(types);
}

}  // namespace

TEST_CASE("score_sequence examples") {
  SequenceModel m(LabelScheme::single(), LearnerKind::crf_lbfgs);
  const auto fvs = one_token("w=Paris", 0.5);
  const auto id = m.intern_feature("w=Paris");
  CHECK(score_sequence(m, fvs, {"O"}) == 0.0);
  CHECK(score_sequence(m, fvs, {"B-entity"}) == 0.0);

  auto p = m.mutable_parameters();
  p[m.view().emission_index(id, 1)] = 2.0;
  CHECK(score_sequence(m, fvs, {"B-entity"}) == doctest::Approx(1.0));
  CHECK(score_sequence(m, fvs, {"O"}) == 0.0);

  p[m.view().transition_index(m.num_labels(), 1)] = 0.25;
  CHECK(score_sequence(m, fvs, {"B-entity"}) == doctest::Approx(1.25));

  CHECK_THROWS_AS(score_sequence(m, fvs, {"B-person"}), DataError);
  CHECK_THROWS(score_sequence(m, fvs, {"O", "O"}));
}

TEST_CASE("score is linear in feature values") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_case(rng);
    std::vector<double> w_emit(c.w);
    for (std::size_t i = 0; i < (c.L + 1) * c.L; ++i) w_emit[i] = 0.0;
    const auto base = score_sequence(view_of(w_emit, c.L), c.x, c.x.labels);
    auto doubled = c.x;
    for (auto& v : doubled.values) v *= 2.0;
    CHECK(score_sequence(view_of(w_emit, c.L), doubled, c.x.labels) == doctest::Approx(2.0 * base));
    CHECK(score_sequence(view_of(c.w, c.L), c.x, c.x.labels) ==
          doctest::Approx(oracle::path_score(c.w, c.L, c.x, c.x.labels)));
  }
}

TEST_CASE("single position with zero weights has uniform marginals") {
  SequenceModel m(LabelScheme({"a"}), LearnerKind::crf_lbfgs);
  m.intern_feature("x");
  const auto lat = forward_backward(m, one_token("x", 1.0));
  for (std::size_t l = 0; l < 3; ++l) CHECK(lat.unary(0, l) == doctest::Approx(1.0 / 3.0));
  CHECK(lat.log_z == doctest::Approx(std::log(3.0)));

  // Two labels: 0.5 / 0.5.
  std::vector<double> w(parameter_count(2, 1), 0.0);
  Instance x;
  x.ids = {0};
  x.values = {1.0};
  x.offsets = {0, 1};
  const auto l2 = forward_backward(view_of(w, 2), x);
  CHECK(l2.unary(0, 0) == doctest::Approx(0.5));
  CHECK(l2.unary(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("forward-backward agrees with enumeration") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng, 1.5);
    const auto lat = forward_backward(view_of(c.w, c.L), c.x);
    const auto ref = oracle::enumerate(c.w, c.L, c.x);
    CHECK(std::abs(lat.log_z - ref.log_z) < 1e-8);
    CHECK(std::abs(lat.log_z - lat.log_z_backward) < 1e-6);
    for (std::size_t t = 0; t < c.x.length(); ++t) {
      double sum = 0.0;
      for (std::size_t l = 0; l < c.L; ++l) {
        CHECK(lat.unary(t, l) == doctest::Approx(ref.unary[t][l]).epsilon(1e-9).scale(1.0));
        sum += lat.unary(t, l);
      }
      CHECK(std::abs(sum - 1.0) < 1e-9);
    }
    for (std::size_t t = 1; t < c.x.length(); ++t) {
      const auto& pw = lat.pairwise[t - 1];
      for (std::size_t a = 0; a < c.L; ++a) {
        double row = 0.0, col = 0.0;
        for (std::size_t b = 0; b < c.L; ++b) {
          row += pw(a, b);
          col += pw(b, a);
        }
        CHECK(row == doctest::Approx(lat.unary(t - 1, a)).epsilon(1e-9).scale(1.0));
        CHECK(col == doctest::Approx(lat.unary(t, a)).epsilon(1e-9).scale(1.0));
      }
    }
  }
}

TEST_CASE("expectation kernel matches full forward-backward") {
  std::mt19937_64 rng(23);
  std::vector<double> scratch;
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_case(rng);
    const auto T = c.x.length();
    const auto lat = forward_backward(view_of(c.w, c.L), c.x);
    std::vector<double> unary(T * c.L), trans((c.L + 1) * c.L);
    const double lz = forward_backward_expectations(view_of(c.w, c.L), c.x, scratch, unary.data(), trans.data());
    CHECK(lz == doctest::Approx(lat.log_z));
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t l = 0; l < c.L; ++l) CHECK(unary[t * c.L + l] == doctest::Approx(lat.unary(t, l)));
    for (std::size_t l = 0; l < c.L; ++l) CHECK(trans[c.L * c.L + l] == doctest::Approx(lat.unary(0, l)));
    for (std::size_t a = 0; a < c.L; ++a)
      for (std::size_t b = 0; b < c.L; ++b) {
        double expect = 0.0;
        for (std::size_t t = 1; t < T; ++t) expect += lat.pairwise[t - 1](a, b);
        CHECK(trans[a * c.L + b] == doctest::Approx(expect));
      }
  }
}

TEST_CASE("viterbi with zero weights picks the first label") {
  const auto scheme = LabelScheme::wnut();
  std::vector<double> w(parameter_count(scheme.num_labels(), 1), 0.0);
  Instance x;
  for (int t = 0; t < 4; ++t) {
    x.ids.push_back(0);
    x.values.push_back(1.0);
    x.offsets.push_back(static_cast<std::uint32_t>(x.ids.size()));
  }
  CHECK(viterbi(view_of(w, scheme.num_labels()), x, scheme) == std::vector<std::size_t>(4, 0));
}

TEST_CASE("viterbi agrees with brute force") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_case(rng, 2.0);
    const auto scheme = scheme_with_at_least(c.L);
    const auto path = viterbi(view_of(c.w, c.L), c.x, scheme);
    const auto ref = oracle::enumerate(c.w, c.L, c.x);
    CHECK(path == ref.argmax);
    CHECK(score_sequence(view_of(c.w, c.L), c.x, path) >= score_sequence(view_of(c.w, c.L), c.x, c.x.labels));
  }
}

TEST_CASE("constrained and cost-augmented viterbi agree with brute force") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const LabelScheme scheme(trial % 2 ? std::vector<std::string>{"a"} : std::vector<std::string>{"a", "b"});
    const std::size_t L = scheme.num_labels();
    const std::size_t F = 4;
    const auto x = oracle::random_instance(rng, 1 + rng() % 5, L, F, 2);
    const auto w = oracle::random_weights(rng, parameter_count(L, F), 2.0);

    const auto mask = bio_transition_mask(scheme);
    DecodeOptions constrained;
    constrained.constrain_bio = true;
    const auto path = viterbi(view_of(w, L), x, scheme, constrained);
    CHECK(path == oracle::enumerate(w, L, x, &mask).argmax);
    std::vector<std::string> names;
    for (auto l : path) names.push_back(scheme.labels()[l]);
    CHECK(is_valid_bio(names));

    // Cost augmentation: brute force over score + Hamming distance.
    DecodeOptions aug;
    aug.cost_against = &x.labels;
    const auto a = viterbi(view_of(w, L), x, scheme, aug);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> arg;
    oracle::for_each_sequence(x.length(), L, [&](const std::vector<std::size_t>& y) {
      const double s = oracle::path_score(w, L, x, y) + static_cast<double>(hamming(y, x.labels));
      if (s > best) {
        best = s;
        arg = y;
      }
    });
    CHECK(a == arg);
  }
}

TEST_CASE("viterbi is invariant to positive scaling of emissions") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = random_case(rng);
    for (std::size_t i = 0; i < (c.L + 1) * c.L; ++i) c.w[i] = 0.0;
    const auto scheme = scheme_with_at_least(c.L);
    const auto a = viterbi(view_of(c.w, c.L), c.x, scheme);
    auto scaled = c.w;
    for (auto& v : scaled) v *= 3.5;
    CHECK(viterbi(view_of(scaled, c.L), c.x, scheme) == a);
  }
}

TEST_CASE("non-finite weights are rejected") {
  std::mt19937_64 rng(41);
  auto c = random_case(rng);
  const auto scheme = scheme_with_at_least(c.L);
  c.w[oracle::emit_idx(c.L, c.x.ids[0], 0)] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(viterbi(view_of(c.w, c.L), c.x, scheme), std::invalid_argument);
  CHECK_THROWS_AS(forward_backward(view_of(c.w, c.L), c.x), std::invalid_argument);
  Instance empty;
  CHECK_THROWS(viterbi(view_of(c.w, c.L), empty, scheme));
}

namespace {

SequenceModel random_model(std::mt19937_64& rng) {
  SequenceModel m(LabelScheme({"person", "geo-loc"}), LearnerKind::crf_pa);
  for (const char* f : {"w=London", "w[-1]=at", "pref=Lo", "p4x1011", "prev_p4x0010", "shape=Xx"})
    m.intern_feature(f);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& v : m.mutable_parameters()) v = (rng() % 3 == 0) ? 0.0 : g(rng);
  m.metadata()["feature.window"] = "-2,2";
  m.metadata()["resource.clusters"] = "/tmp/paths with space";
  return m;
}

}  // namespace

TEST_CASE("model save/load round trip") {
  std::mt19937_64 rng(43);
  const auto m = random_model(rng);
  std::stringstream ss;
  m.save(ss);
  const auto text = ss.str();
  CHECK(text.rfind("#nerkit-model\n#version=1\n", 0) == 0);
  const auto back = SequenceModel::load(ss);
  CHECK(same_weights(m, back));
  CHECK(back.metadata() == m.metadata());
  CHECK(back.learner() == LearnerKind::crf_pa);
  std::ostringstream again;
  back.save(again);
  CHECK(again.str() == text);

  // Decoding through a reloaded model is bit-identical.
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FeatureVector> fvs(1 + rng() % 5);
    for (auto& fv : fvs) {
      fv.add("w=London", 1.0);
      if (rng() % 2) fv.add("p4x1011", 0.7);
      if (rng() % 2) fv.add("w[-1]=at");
      fv.add("unseen", 1.0);
    }
    CHECK(decode(m, fvs) == decode(back, fvs));
    CHECK(forward_backward(m, fvs).log_z == forward_backward(back, fvs).log_z);
  }
}

TEST_CASE("empty model round trip") {
  const SequenceModel m(LabelScheme::wnut(), LearnerKind::perceptron);
  std::stringstream ss;
  m.save(ss);
  const auto back = SequenceModel::load(ss);
  CHECK(back.num_features() == 0);
  CHECK(back.scheme() == LabelScheme::wnut());
  CHECK(same_weights(m, back));
}

TEST_CASE("model load errors") {
  auto load = [](const std::string& s) {
    std::istringstream in(s);
    return SequenceModel::load(in);
  };
  const std::string head = "#nerkit-model\n#version=1\n#learner=crf-lbfgs\n#types=a\n";
  CHECK_NOTHROW(load(head + "w=x\tB-a\t1.5\n"));
  CHECK_THROWS_WITH_AS(load("#nerkit-model\n#version=2\n#learner=crf-lbfgs\n#types=a\n"),
                       doctest::Contains("version 2"), DataError);
  CHECK_THROWS_WITH_AS(load(head + "w=x\tB-a\t1.5\nw=y\tB-a\n"), doctest::Contains("line 6"), DataError);
  CHECK_THROWS_WITH_AS(load(head + "w=x\tB-b\t1.0\n"), doctest::Contains("line 5"), DataError);
  CHECK_THROWS_WITH_AS(load(head + "w=x\tO\tabc\n"), doctest::Contains("not a number"), DataError);
  CHECK_THROWS_AS(load(head + "w=x\tO\tnan\n"), DataError);
  CHECK_THROWS_AS(load("w=x\tO\t1\n"), DataError);
  CHECK_THROWS_AS(load("#nerkit-model\n#learner=crf-lbfgs\n#types=a\n"), DataError);
  CHECK_THROWS_AS(load("#nerkit-model\n#version=1\n#learner=svm\n#types=a\n"), DataError);

  // A feature name that starts with '#' is still a row, not a header.
  const auto m = load(head + "#tag=#fail\tB-a\t2\n");
  CHECK(m.feature_id("#tag=#fail"));
}

TEST_CASE("feature names that cannot be serialised are rejected") {
  SequenceModel m(LabelScheme::single(), LearnerKind::crf_lbfgs);
  CHECK_THROWS_AS(m.intern_feature(""), std::invalid_argument);
  CHECK_THROWS_AS(m.intern_feature("T:O"), std::invalid_argument);
  CHECK_THROWS_AS(m.intern_feature("a\tb"), std::invalid_argument);
  CHECK_THROWS_AS(m.intern_feature("a\nb"), std::invalid_argument);
  CHECK(m.intern_feature("w=a") == 0);
  CHECK(m.intern_feature("w=a") == 0);
  CHECK(m.num_features() == 1);
}

TEST_CASE("top_features") {
  SequenceModel m(LabelScheme({"geo-loc"}), LearnerKind::crf_lbfgs);
  const auto a = m.intern_feature("w[-1]=at");
  const auto b = m.intern_feature("p4x1011");
  const auto c = m.intern_feature("pref=Lo");
  auto p = m.mutable_parameters();
  const auto v = m.view();
  p[v.emission_index(a, 1)] = 3.0;
  p[v.emission_index(b, 1)] = -2.0;
  p[v.emission_index(c, 1)] = 1.0;
  p[v.emission_index(c, 2)] = 1.0;
  p[v.transition_index(1, 2)] = 0.5;

  CHECK(m.top_features(0).empty());
  const auto all = m.top_features(100);
  REQUIRE(all.size() == 5);
  CHECK(all[0].name == "w[-1]=at");
  CHECK(all[1].name == "p4x1011");
  CHECK(all[1].weight == -2.0);
  CHECK(all[2].name == "pref=Lo");
  CHECK(all[2].label == "B-geo-loc");
  CHECK(all[3].label == "I-geo-loc");
  CHECK(all[4].name == "T:B-geo-loc");
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(std::abs(all[i - 1].weight) >= std::abs(all[i].weight));

  const auto ps = m.top_features(10, {"p"});
  REQUIRE(ps.size() == 3);
  for (const auto& f : ps) CHECK(f.name != "w[-1]=at");
  CHECK(m.top_features(1, {"w["}).front().name == "w[-1]=at");
}
