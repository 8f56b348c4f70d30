// Small hand-written data sets shared by the unit and acceptance tests.
#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "nerkit/corpus.hpp"
#include "nerkit/features.hpp"
#include "nerkit/learner.hpp"

namespace fixture {

// 20 short tweets, one or two entities each.
inline const char* const kTinyCorpus = R"(just	O
saw	O
Taylor	B-person
Swift	I-person
tonight	O

heading	O
to	O
London	B-geo-loc
this	O
weekend	O

Google	B-company
stock	O
is	O
up	O

come	O
on	O
Arsenal	B-sportsteam
!	O

my	O
iPhone	B-product
screen	O
cracked	O

watching	O
Frozen	B-movie
again	O

new	O
episode	O
of	O
Sherlock	B-tvshow
tonight	O

Coldplay	B-musicartist
live	O
was	O
amazing	O

happy	O
Christmas	B-other
everyone	O

concert	O
at	O
Wembley	B-facility
Stadium	I-facility

lol	O
good	O
morning	O
world	O

weather	O
in	O
Paris	B-geo-loc
is	O
awful	O

met	O
Tom	B-person
Hanks	I-person
and	O
Adele	B-person

Apple	B-company
announced	O
a	O
watch	O

Chelsea	B-sportsteam
lost	O
again	O

flight	O
to	O
New	B-geo-loc
York	I-geo-loc
delayed	O

finally	O
got	O
the	O
PS4	B-product

Lakers	B-sportsteam
vs	O
Warriors	B-sportsteam
tonight	O

so	O
tired	O
today	O

binge	O
watching	O
Lost	B-tvshow
with	O
Uber	B-company
driver	O
)";

inline std::vector<nerkit::Sentence> tiny_corpus() {
  std::istringstream in(kTinyCorpus);
  return nerkit::read_conll(in, nerkit::LabelScheme::wnut());
}

inline nerkit::FeatureConfig lexical_config() {
  nerkit::FeatureConfig c;
  c.use_clusters = c.use_term_freq = c.use_gazetteers = c.use_pos = false;
  return c;
}

inline std::vector<nerkit::LabeledSequence> labeled(const std::vector<nerkit::Sentence>& sentences,
                                                    const nerkit::FeatureConfig& config = lexical_config()) {
  std::vector<nerkit::LabeledSequence> out;
  for (const auto& s : sentences) out.push_back({nerkit::extract(s, {}, config), *s.labels});
  return out;
}

}  // namespace fixture
