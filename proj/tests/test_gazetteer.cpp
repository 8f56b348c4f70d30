#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nerkit/gazetteer.hpp"
#include "nerkit/log.hpp"
#include "nerkit/text.hpp"
#include "oracles.hpp"

using namespace nerkit;

namespace {

GazetteerCatalog catalog(const std::vector<std::pair<std::string, std::string>>& entries) {
  GazetteerCatalog c;
  for (const auto& [source, text] : entries) {
    std::istringstream in(text);
    c.add_all(load_gazetteer(in, source, false));
  }
  return c;
}

bool has(const std::vector<std::string>& xs, const std::string& x) {
  return std::find(xs.begin(), xs.end(), x) != xs.end();
}

}  // namespace

TEST_CASE("load_gazetteer") {
  std::istringstream a("Xbox 360\nPlayStation\n\n");
  auto e = load_gazetteer(a, "Freebase_videogameplatform", false);
  REQUIRE(e.size() == 2);
  std::size_t two = 0;
  for (const auto& x : e) two += x.tokens.size() == 2;
  CHECK(two == 1);
  CHECK(e[0].tokens[0] == "playstation");

  std::istringstream b("LONDON\nlondon\n");
  CHECK(load_gazetteer(b, "s", false).size() == 1);

  std::vector<std::string> warnings;
  auto prev = set_warning_sink([&](const std::string& m) { warnings.push_back(m); });
  std::istringstream c("\n\n");
  CHECK(load_gazetteer(c, "empty", false).empty());
  set_warning_sink(prev);
  CHECK(warnings.size() == 1);
}

TEST_CASE("feature names use the source as stem") {
  auto c = catalog({{"Freebase_videogameplatform", "Xbox 360"}});
  auto m = c.match({"my", "xbox", "360"});
  CHECK(m[0].empty());
  CHECK(m[1] == std::vector<std::string>{"in_gaz=Freebase_videogameplatform"});
  CHECK(m[2] == m[1]);

  GazetteerEntry alias{{"bieber"}, "Freebase_person", true};
  CHECK(GazetteerCatalog::feature_source(alias) == "Freebase_person_alias");
}

TEST_CASE("match examples") {
  auto c = catalog({{"S", "new york city"}});
  for (const auto& f : c.match({"new", "york", "city"})) CHECK(f == std::vector<std::string>{"in_gaz=S"});

  auto d = catalog({{"S", "new york"}});
  auto m = d.match({"New", "YORK"});
  CHECK(m[0].size() == 1);
  CHECK(m[1].size() == 1);

  auto e = catalog({{"S", "new york\nnew york city"}});
  auto n = e.match({"new", "york", "city"});
  for (const auto& f : n) CHECK(f.size() == 1);

  auto multi = catalog({{"A", "new york"}, {"B", "york"}});
  auto o = multi.match({"new", "york"});
  CHECK(o[0] == std::vector<std::string>{"in_gaz=A"});
  CHECK(o[1] == std::vector<std::string>{"in_gaz=A", "in_gaz=B"});
}

TEST_CASE("longest match agrees with span enumeration") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> vocab = {"a", "b", "c", "d"};
  for (int trial = 0; trial < 500; ++trial) {
    std::set<std::vector<std::string>> entries;
    std::string list;
    const auto n = 1 + rng() % 6;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<std::string> e(1 + rng() % 3);
      for (auto& t : e) t = vocab[rng() % vocab.size()];
      entries.insert(e);
      for (const auto& t : e) list += t + " ";
      list += "\n";
    }
    auto c = catalog({{"S", list}});
    std::vector<std::string> toks(rng() % 10);
    for (auto& t : toks) t = vocab[rng() % vocab.size()];
    const auto want = oracle::longest_match_cover(toks, entries);
    const auto got = c.match(toks);
    for (std::size_t i = 0; i < toks.size(); ++i) CHECK(want[i] == !got[i].empty());
  }
}

TEST_CASE("case invariance") {
  std::mt19937_64 rng(23);
  auto c = catalog({{"S", "Ünïcode city\nnew YORK\nΑθήνα"}, {"T", "city"}});
  const std::vector<std::string> vocab = {"ünïcode", "CITY", "new", "york", "αθήνα", "x"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> toks(rng() % 8), upper;
    for (auto& t : toks) t = vocab[rng() % vocab.size()];
    for (auto& t : toks) upper.push_back(text::upper_case(t));
    CHECK(c.match(toks) == c.match(upper));
  }
}

TEST_CASE("adding entries never removes features across sources") {
  std::mt19937_64 rng(31);
  const std::vector<std::string> vocab = {"a", "b", "c"};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::pair<std::string, std::string>> base;
    for (int k = 0; k < 3; ++k) {
      std::string e;
      for (std::size_t j = 0; j < 1 + rng() % 2; ++j) e += vocab[rng() % 3] + " ";
      base.emplace_back(k % 2 ? "S" : "T", e);
    }
    std::vector<std::string> toks(1 + rng() % 6);
    for (auto& t : toks) t = vocab[rng() % 3];
    const auto before = catalog(base).match(toks);

    auto more = base;
    more.emplace_back("U", vocab[rng() % 3] + " " + vocab[rng() % 3]);
    const auto after = catalog(more).match(toks);
    for (std::size_t i = 0; i < toks.size(); ++i)
      for (const auto& f : before[i]) CHECK(has(after[i], f));

    auto unmatched = base;
    unmatched.emplace_back("S", "zzz");
    CHECK(catalog(unmatched).match(toks) == before);
  }
}

TEST_CASE("within one source a longer entry can shadow a shorter one") {
  // Greedy longest match: "a b" consumes b, so "b c" no longer fits.
  auto before = catalog({{"S", "b c"}}).match({"a", "b", "c"});
  auto after = catalog({{"S", "b c\na b"}}).match({"a", "b", "c"});
  CHECK(before[2].size() == 1);
  CHECK(after[2].empty());
}

TEST_CASE("manifest and type table") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "nerkit_gaz_test";
  fs::create_directories(dir);
  std::ofstream(dir / "people.txt") << "Justin Bieber\nAdele\n";
  std::ofstream(dir / "people_alias.txt") << "Bieber\n";
  std::ofstream(dir / "trig.txt") << "tonight\n";
  std::ofstream(dir / "manifest.tsv") << "# comment\nFreebase_person\tpeople.txt\tname\tperson\n"
                                      << "Freebase_person\tpeople_alias.txt\talias\tperson\n"
                                      << "trig\ttrig.txt\tno\t-\n";
  const auto c = GazetteerCatalog::load_manifest((dir / "manifest.tsv").string());
  CHECK(c.sources() == std::vector<std::string>{"Freebase_person", "Freebase_person_alias", "trig"});
  CHECK(c.entry_count() == 4);
  CHECK(c.type_of("Freebase_person") == "person");
  CHECK(c.type_of("Freebase_person_alias") == "person");
  CHECK_FALSE(c.type_of("trig").has_value());
  auto m = c.match({"justin", "bieber", "tonight"});
  CHECK(m[1] == std::vector<std::string>{"in_gaz=Freebase_person", "in_gaz=Freebase_person_alias"});
  CHECK(m[2] == std::vector<std::string>{"in_gaz=trig"});

  std::ofstream(dir / "bad.tsv") << "x\tmissing.txt\tname\tperson\n";
  CHECK_THROWS_AS(GazetteerCatalog::load_manifest((dir / "bad.tsv").string()), DataError);
  std::ofstream(dir / "bad2.tsv") << "x\tpeople.txt\tmaybe\tperson\n";
  CHECK_THROWS_AS(GazetteerCatalog::load_manifest((dir / "bad2.tsv").string()), DataError);
  fs::remove_all(dir);

  std::ifstream types(std::string(NERKIT_DATA_DIR) + "/freebase_types.tsv");
  REQUIRE(types);
  const auto table = load_type_table(types);
  CHECK(table.count("product") == 18);
  CHECK(table.count("person") == 1);
  CHECK(table.find("person")->second == "/people/person");
  std::set<std::string> ne;
  for (const auto& [k, v] : table) ne.insert(k);
  CHECK(ne.size() == 10);
}
