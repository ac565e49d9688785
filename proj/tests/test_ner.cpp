#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kgqa/errors.hpp"
#include "kgqa/kg.hpp"
#include "kgqa/ner.hpp"
#include "kgqa/text.hpp"

#include "helpers.hpp"

using kgqa::EmissionModel;
using kgqa::EmissionScores;
using kgqa::EntityMention;
using kgqa::Gazetteer;
using kgqa::KnowledgeGraph;
using kgqa::LabelSet;
using kgqa::NerModel;
using kgqa::TaggedSentence;
using kgqa::TagSequence;
using kgqa::TransitionMatrix;
using kgqa_tests::open_fixture;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reference decoder: scores every one of the k^n complete paths and keeps
/// the maximum, first-in-lexicographic-order. Written independently of the
/// production decoder so the two can disagree.
TagSequence enumerate_best(const EmissionScores& e, const TransitionMatrix& a,
                           const LabelSet& ls) {
  const int n = e.length();
  const int k = ls.size();
  std::vector<int> path(static_cast<std::size_t>(n), 0);
  TagSequence best;
  best.score = -kInf;
  bool done = n == 0;
  while (!done) {
    double score = a.at(ls.start_index(), path[0]) + e.at(0, path[0]);
    for (int t = 1; t < n; ++t) {
      score += a.at(path[static_cast<std::size_t>(t) - 1], path[static_cast<std::size_t>(t)]) +
               e.at(t, path[static_cast<std::size_t>(t)]);
    }
    score += a.at(path[static_cast<std::size_t>(n) - 1], ls.stop_index());
    if (score > best.score) {
      best.score = score;
      best.tags = path;
    }
    int pos = n - 1;
    while (pos >= 0 && path[static_cast<std::size_t>(pos)] == k - 1) {
      path[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) {
      done = true;
    } else {
      ++path[static_cast<std::size_t>(pos)];
    }
  }
  return best;
}

/// Scores drawn from the grid {-32/16 .. 32/16} so every path sum is exact
/// in double precision and cross-implementation comparisons can use ==.
double dyadic(std::mt19937& rng) { return (static_cast<int>(rng() % 65) - 32) / 16.0; }

KnowledgeGraph toy_graph() {
  KnowledgeGraph g;
  auto in = open_fixture("toy_kg.tsv");
  g.import_tsv(in);
  return g;
}

std::vector<TaggedSentence> fixture_corpus() {
  auto in = open_fixture("ner_corpus.tsv");
  return kgqa::load_ner_corpus(in);
}

}  // namespace

TEST_CASE("LabelSet indexes labels and exposes the virtual states") {
  const LabelSet ls({"B-disease", "I-disease", "O"});
  CHECK(ls.size() == 3);
  CHECK(ls.start_index() == 3);
  CHECK(ls.stop_index() == 4);
  CHECK(ls.index("I-disease") == 1);
  CHECK(ls.index("missing") == -1);
  CHECK(ls.label(2) == "O");

  CHECK(LabelSet::is_outside("O"));
  CHECK(LabelSet::is_begin("B-drug"));
  CHECK_FALSE(LabelSet::is_begin("O"));
  CHECK(LabelSet::is_inside("I-drug"));
  CHECK(LabelSet::entity_type("B-drug") == "drug");
  CHECK(LabelSet::entity_type("O") == "");
}

TEST_CASE("LabelSet rejects malformed inventories") {
  CHECK_THROWS_AS(LabelSet({}), kgqa::InvalidBioSequence);
  CHECK_THROWS_AS(LabelSet({"B-disease", "disease"}), kgqa::InvalidBioSequence);
  CHECK_THROWS_AS(LabelSet({"O", "O"}), kgqa::InvalidBioSequence);
  CHECK_THROWS_AS(LabelSet({"B-"}), kgqa::InvalidBioSequence);
}

TEST_CASE("viterbi handles degenerate shapes") {
  const LabelSet ls({"B-x", "O"});
  SUBCASE("empty input decodes to the empty path") {
    const TagSequence got = kgqa::viterbi(EmissionScores(0, 2), TransitionMatrix(2), ls);
    CHECK(got.tags.empty());
  }
  SUBCASE("one token reduces to argmax of start + emission + stop") {
    EmissionScores e(1, 2);
    e.set(0, 0, 0.25);
    e.set(0, 1, 0.75);
    TransitionMatrix a(2);
    a.set(ls.start_index(), 0, 1.0);  // 1.0 + 0.25 < 0.0 + 0.75? no: 1.25 > 0.75
    const TagSequence got = kgqa::viterbi(e, a, ls);
    CHECK(got.tags == std::vector<int>{0});
    CHECK(got.score == 1.25);
  }
  SUBCASE("size disagreement is rejected") {
    CHECK_THROWS_AS(kgqa::viterbi(EmissionScores(2, 3), TransitionMatrix(3), ls),
                    kgqa::LengthMismatch);
  }
}

TEST_CASE("viterbi with zero transitions is a per-token argmax") {
  const LabelSet ls({"B-x", "I-x", "O"});
  EmissionScores e(3, 3);
  const double table[3][3] = {{0.0, 1.0, 0.5}, {2.0, 2.0, -1.0}, {-0.5, 0.25, 0.25}};
  for (int t = 0; t < 3; ++t) {
    for (int j = 0; j < 3; ++j) e.set(t, j, table[t][j]);
  }
  const TagSequence got = kgqa::viterbi(e, TransitionMatrix(3), ls);
  // ties resolve to the smallest label index at each position
  CHECK(got.tags == std::vector<int>{1, 0, 1});
  CHECK(got.score == 3.25);
}

TEST_CASE("viterbi ties resolve to the lexicographically smallest path") {
  const LabelSet ls({"B-x", "O"});
  // everything zero: all four paths over two tokens tie at score 0
  const TagSequence got = kgqa::viterbi(EmissionScores(2, 2), TransitionMatrix(2), ls);
  CHECK(got.tags == std::vector<int>{0, 0});
  CHECK(got.score == 0.0);
}

TEST_CASE("viterbi reports infeasibility instead of returning a forbidden path") {
  const LabelSet ls({"B-x", "O"});
  TransitionMatrix a(2);
  a.set(ls.start_index(), 0, TransitionMatrix::forbidden());
  a.set(ls.start_index(), 1, TransitionMatrix::forbidden());
  CHECK_THROWS_AS(kgqa::viterbi(EmissionScores(2, 2), a, ls), kgqa::NoFeasiblePath);

  // forbidding only one entry leaves a feasible path
  TransitionMatrix b(2);
  b.set(ls.start_index(), 0, TransitionMatrix::forbidden());
  const TagSequence got = kgqa::viterbi(EmissionScores(2, 2), b, ls);
  CHECK(got.tags == std::vector<int>{1, 0});
}

TEST_CASE("adding a constant to one emission row shifts the score, not the path") {
  const LabelSet ls({"B-x", "I-x", "O"});
  std::mt19937 rng(311);
  for (int round = 0; round < 20; ++round) {
    EmissionScores e(4, 3);
    TransitionMatrix a(3);
    for (int t = 0; t < 4; ++t) {
      for (int j = 0; j < 3; ++j) e.set(t, j, dyadic(rng));
    }
    for (int from = 0; from < 5; ++from) {
      for (int to = 0; to < 5; ++to) a.set(from, to, dyadic(rng));
    }
    const TagSequence base = kgqa::viterbi(e, a, ls);
    const double c = 0.4375;  // 7/16
    for (int j = 0; j < 3; ++j) e.add(2, j, c);
    const TagSequence shifted = kgqa::viterbi(e, a, ls);
    CHECK(shifted.tags == base.tags);
    CHECK(shifted.score == base.score + c);
  }
}

TEST_CASE("viterbi agrees exactly with exhaustive path enumeration") {
  std::mt19937 rng(170523);
  int infeasible_draws = 0;
  for (int round = 0; round < 100; ++round) {
    const int k = 1 + static_cast<int>(rng() % 4);
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<std::string> labels;
    for (int j = 0; j + 1 < k; ++j) labels.push_back("B-t" + std::to_string(j));
    labels.push_back("O");
    const LabelSet ls(labels);

    EmissionScores e(n, k);
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < k; ++j) e.set(t, j, dyadic(rng));
    }
    TransitionMatrix a(k);
    for (int from = 0; from < k + 2; ++from) {
      for (int to = 0; to < k + 2; ++to) {
        a.set(from, to, rng() % 10 == 0 ? TransitionMatrix::forbidden() : dyadic(rng));
      }
    }

    const TagSequence want = enumerate_best(e, a, ls);
    if (want.score == -kInf) {
      ++infeasible_draws;
      CHECK_THROWS_AS(kgqa::viterbi(e, a, ls), kgqa::NoFeasiblePath);
      continue;
    }
    const TagSequence got = kgqa::viterbi(e, a, ls);
    CHECK(got.score == want.score);  // exact: all scores are dyadic rationals
    CHECK(got.tags == want.tags);
  }
  // the draw distribution should exercise the feasible branch nearly always
  CHECK(infeasible_draws < 20);
}

TEST_CASE("constrain_bio forbids exactly the illegal transitions") {
  const LabelSet ls({"B-disease", "B-drug", "I-disease", "I-drug", "O"});
  TransitionMatrix a(5);
  for (int from = 0; from < 7; ++from) {
    for (int to = 0; to < 7; ++to) a.set(from, to, 1.0);
  }
  const TransitionMatrix c = kgqa::constrain_bio(a, ls);
  const int b_dis = 0, b_drug = 1, i_dis = 2, i_drug = 3, o = 4;

  CHECK(c.at(ls.start_index(), i_dis) == -kInf);
  CHECK(c.at(o, i_dis) == -kInf);
  CHECK(c.at(b_drug, i_dis) == -kInf);
  CHECK(c.at(i_drug, i_dis) == -kInf);
  CHECK(c.at(b_dis, i_dis) == 1.0);
  CHECK(c.at(i_dis, i_dis) == 1.0);
  CHECK(c.at(ls.start_index(), b_dis) == 1.0);
  CHECK(c.at(ls.start_index(), o) == 1.0);
  CHECK(c.at(i_drug, ls.stop_index()) == 1.0);
  // rows into non-inside labels are untouched
  CHECK(c.at(i_dis, b_drug) == 1.0);
  CHECK(c.at(o, o) == 1.0);
}

TEST_CASE("constrained decoding always yields a valid BIO sequence") {
  const LabelSet ls({"B-disease", "B-drug", "I-disease", "I-drug", "O"});
  std::mt19937 rng(99531);
  std::vector<std::string> tokens(8, "tok");
  for (int round = 0; round < 1000; ++round) {
    const int n = 1 + static_cast<int>(rng() % 8);
    EmissionScores e(n, 5);
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < 5; ++j) e.set(t, j, dyadic(rng));
    }
    TransitionMatrix a(5);
    for (int from = 0; from < 7; ++from) {
      for (int to = 0; to < 7; ++to) a.set(from, to, dyadic(rng));
    }
    const TagSequence ts =
        kgqa::viterbi(e, kgqa::constrain_bio(a, ls), ls);
    const std::vector<std::string> toks(tokens.begin(), tokens.begin() + n);
    // decode_mentions re-validates the BIO grammar and throws on violations
    CHECK_NOTHROW(kgqa::decode_mentions(toks, ts, ls));
  }
}

TEST_CASE("without the constraint an I tag can lead the sequence") {
  const LabelSet ls({"B-disease", "I-disease", "O"});
  EmissionScores e(2, 3);
  e.set(0, 1, 10.0);  // strongly prefer I-disease first
  e.set(1, 2, 1.0);
  const TransitionMatrix a(3);

  const TagSequence raw = kgqa::viterbi(e, a, ls);
  CHECK(raw.tags[0] == 1);
  CHECK_THROWS_AS(kgqa::decode_mentions({"x", "y"}, raw, ls), kgqa::InvalidBioSequence);

  const TagSequence fixed = kgqa::viterbi(e, kgqa::constrain_bio(a, ls), ls);
  CHECK_NOTHROW(kgqa::decode_mentions({"x", "y"}, fixed, ls));
  CHECK(fixed.tags[0] != 1);
}

TEST_CASE("decode_mentions groups maximal B/I runs") {
  const LabelSet ls({"B-disease", "B-virus", "I-disease", "I-virus", "O"});
  const std::vector<std::string> tokens{"the", "hepatitis", "B", "virus", "spreads"};
  TagSequence ts;
  ts.tags = {4, 1, 3, 3, 4};  // O B-virus I-virus I-virus O
  const auto mentions = kgqa::decode_mentions(tokens, ts, ls);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].text == "hepatitis B virus");
  CHECK(mentions[0].label == "virus");
  CHECK(mentions[0].token_span == std::pair<int, int>{1, 3});
  CHECK(mentions[0].entity_id.empty());
}

TEST_CASE("decode_mentions ends a run at a type switch") {
  const LabelSet ls({"B-disease", "B-virus", "I-disease", "I-virus", "O"});
  TagSequence ts;
  ts.tags = {0, 1};  // B-disease B-virus: two adjacent single-token mentions
  const auto mentions = kgqa::decode_mentions({"flu", "rhinovirus"}, ts, ls);
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].label == "disease");
  CHECK(mentions[1].label == "virus");
}

TEST_CASE("decode_mentions rejects malformed tag sequences") {
  const LabelSet ls({"B-disease", "B-virus", "I-disease", "I-virus", "O"});
  TagSequence leading_i;
  leading_i.tags = {2, 4};
  CHECK_THROWS_AS(kgqa::decode_mentions({"a", "b"}, leading_i, ls), kgqa::InvalidBioSequence);
  TagSequence cross_type;
  cross_type.tags = {1, 2};  // B-virus then I-disease
  CHECK_THROWS_AS(kgqa::decode_mentions({"a", "b"}, cross_type, ls), kgqa::InvalidBioSequence);
  TagSequence after_o;
  after_o.tags = {4, 3};  // O then I-virus
  CHECK_THROWS_AS(kgqa::decode_mentions({"a", "b"}, after_o, ls), kgqa::InvalidBioSequence);
  TagSequence wrong_len;
  wrong_len.tags = {4};
  CHECK_THROWS_AS(kgqa::decode_mentions({"a", "b"}, wrong_len, ls), kgqa::LengthMismatch);
}

TEST_CASE("bio_encode inverts decode_mentions on random span sets") {
  const LabelSet ls({"B-disease", "B-drug", "I-disease", "I-drug", "O"});
  std::mt19937 rng(88);
  for (int round = 0; round < 50; ++round) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<EntityMention> mentions;
    int pos = 0;
    while (pos < n) {
      if (rng() % 3 == 0) {
        const int last = pos + static_cast<int>(rng() % 3);
        if (last >= n) break;
        EntityMention m;
        m.label = rng() % 2 == 0 ? "disease" : "drug";
        m.token_span = {pos, last};
        mentions.push_back(m);
        pos = last + 2;
      } else {
        ++pos;
      }
    }
    std::vector<std::string> tokens;
    for (int i = 0; i < n; ++i) tokens.push_back("t" + std::to_string(i));

    const TagSequence encoded = kgqa::bio_encode(mentions, n, ls);
    const auto decoded = kgqa::decode_mentions(tokens, encoded, ls);
    REQUIRE(decoded.size() == mentions.size());
    for (std::size_t i = 0; i < mentions.size(); ++i) {
      CHECK(decoded[i].token_span == mentions[i].token_span);
      CHECK(decoded[i].label == mentions[i].label);
    }
  }
}

TEST_CASE("bio_encode validates its span list") {
  const LabelSet ls({"B-disease", "I-disease", "O"});
  EntityMention a;
  a.label = "disease";
  a.token_span = {0, 1};
  EntityMention b = a;
  b.token_span = {1, 2};
  CHECK_THROWS_AS(kgqa::bio_encode({a, b}, 5, ls), kgqa::InvalidBioSequence);  // overlap
  EntityMention oob = a;
  oob.token_span = {3, 7};
  CHECK_THROWS_AS(kgqa::bio_encode({oob}, 5, ls), kgqa::InvalidBioSequence);  // out of range
  EntityMention alien = a;
  alien.label = "drug";
  CHECK_THROWS_AS(kgqa::bio_encode({alien}, 5, ls), kgqa::InvalidBioSequence);  // no B-drug
  const TagSequence ok = kgqa::bio_encode({a}, 3, ls);
  CHECK(ok.tags == std::vector<int>{0, 1, 2});
}

TEST_CASE("gazetteer finds dictionary mentions with byte-true surfaces") {
  const KnowledgeGraph g = toy_graph();
  const Gazetteer gaz(g);
  const auto mentions = gaz.tag(kgqa::tokenize("Which drugs can treat AIDS?"));
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].text == "AIDS");
  CHECK(mentions[0].label == "disease");
  CHECK(mentions[0].token_span == std::pair<int, int>{4, 4});
  CHECK(mentions[0].entity_id == "D1");
}

TEST_CASE("gazetteer prefers the longest match at the leftmost start") {
  const KnowledgeGraph g = toy_graph();
  const Gazetteer gaz(g);
  // "hepatitis B virus" must win over its prefix "hepatitis B"
  const auto mentions = gaz.tag(kgqa::tokenize("the hepatitis B virus spreads"));
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].text == "hepatitis B virus");
  CHECK(mentions[0].label == "virus");
  CHECK(mentions[0].token_span == std::pair<int, int>{1, 3});
}

TEST_CASE("gazetteer matching is case-insensitive and non-overlapping") {
  const KnowledgeGraph g = toy_graph();
  const Gazetteer gaz(g);
  const auto mentions = gaz.tag(kgqa::tokenize("does SORAFENIB help against hcc"));
  REQUIRE(mentions.size() == 2);
  CHECK(mentions[0].text == "SORAFENIB");
  CHECK(mentions[0].label == "drug");
  CHECK(mentions[1].text == "hcc");
  CHECK(mentions[1].label == "disease");
  CHECK(mentions[0].token_span.second < mentions[1].token_span.first);
}

TEST_CASE("gazetteer resolves duplicate surfaces to the smallest entity id") {
  KnowledgeGraph g;
  g.add_entity({"Z9", "ultrasound", "procedure"});
  g.add_entity({"A1", "Ultrasound", "test"});
  const Gazetteer gaz(g);
  const auto mentions = gaz.tag(kgqa::tokenize("get an ultrasound now"));
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_id == "A1");
  CHECK(mentions[0].label == "test");
}

TEST_CASE("gazetteer handles empty input and reports token types") {
  const KnowledgeGraph g = toy_graph();
  const Gazetteer gaz(g);
  CHECK(gaz.tag({}).empty());
  CHECK(gaz.tag(kgqa::tokenize("nothing matches here")).empty());
  CHECK_FALSE(gaz.empty());
  CHECK(Gazetteer{}.empty());
  // "hepatitis" occurs inside disease names and virus names
  CHECK(gaz.types_of_token("hepatitis") == std::vector<std::string>{"disease", "virus"});
  CHECK(gaz.types_of_token("sorafenib") == std::vector<std::string>{"drug"});
  CHECK(gaz.types_of_token("unknown").empty());
}

TEST_CASE("extract_features emits identity, shape, context, and gazetteer marks") {
  const auto plain = kgqa::extract_features({"AIDS", "spreads"}, nullptr);
  REQUIRE(plain.size() == 2);
  CHECK(plain[0] == std::vector<std::string>{"w=aids", "shape=XXXX", "prev=<s>", "next=spreads"});
  CHECK(plain[1] == std::vector<std::string>{"w=spreads", "shape=xxxxxxx", "prev=aids", "next=</s>"});

  const KnowledgeGraph g = toy_graph();
  const Gazetteer gaz(g);
  const auto with_gaz = kgqa::extract_features({"AIDS"}, &gaz);
  CHECK(with_gaz[0] == std::vector<std::string>{"w=aids", "shape=XXXX", "prev=<s>", "next=</s>",
                                                "gaz=disease"});

  const auto shaped = kgqa::extract_features({"Hand-3."}, nullptr);
  CHECK(shaped[0][1] == "shape=Xxxx.d.");
}

TEST_CASE("emission scores sum active feature weights per label") {
  const LabelSet ls({"B-x", "O"});
  EmissionModel m;
  CHECK(m.weight("w=aids", 0) == 0.0);
  m.update("w=aids", 0, 2.0, ls.size());
  m.update("shape=XXXX", 0, 0.5, ls.size());
  m.update("w=aids", 1, -1.0, ls.size());
  const EmissionScores s = kgqa::score_emissions(m, {"AIDS"}, ls);
  CHECK(s.at(0, 0) == 2.5);
  CHECK(s.at(0, 1) == -1.0);
  // unrelated tokens score zero everywhere
  const EmissionScores zero = kgqa::score_emissions(m, {"other"}, ls);
  CHECK(zero.at(0, 0) == 0.0);
  CHECK(zero.at(0, 1) == 0.0);
}

TEST_CASE("load_ner_corpus splits sentences on blank lines") {
  std::istringstream in(
      "AIDS\tB-disease\n"
      "spreads\tO\n"
      "\n"
      "\n"
      "aspirin\tB-drug\n");
  const auto corpus = kgqa::load_ner_corpus(in);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].tokens == std::vector<std::string>{"AIDS", "spreads"});
  CHECK(corpus[0].tags == std::vector<std::string>{"B-disease", "O"});
  CHECK(corpus[1].tokens == std::vector<std::string>{"aspirin"});
}

TEST_CASE("load_ner_corpus rejects rows without exactly one interior tab") {
  std::istringstream no_tab("token O\n");
  CHECK_THROWS_AS(kgqa::load_ner_corpus(no_tab), kgqa::ParseFailure);
  std::istringstream two_tabs("token\tO\textra\n");
  CHECK_THROWS_AS(kgqa::load_ner_corpus(two_tabs), kgqa::ParseFailure);
  std::istringstream empty_tag("token\t\n");
  CHECK_THROWS_AS(kgqa::load_ner_corpus(empty_tag), kgqa::ParseFailure);
  std::istringstream empty_token("\tO\n");
  CHECK_THROWS_AS(kgqa::load_ner_corpus(empty_token), kgqa::ParseFailure);
}

TEST_CASE("fixture corpus loads 20 sentences with a sorted label inventory") {
  const auto corpus = fixture_corpus();
  CHECK(corpus.size() == 20);
  const LabelSet ls = kgqa::label_set_from_corpus(corpus);
  CHECK(ls.index("O") >= 0);
  CHECK(std::is_sorted(ls.labels().begin(), ls.labels().end()));
  for (const TaggedSentence& s : corpus) {
    CHECK(s.tokens.size() == s.tags.size());
  }
}

TEST_CASE("perceptron training is a fixed point once the corpus is fit") {
  const std::vector<TaggedSentence> corpus{{{"just", "words"}, {"O", "O"}}};
  const LabelSet ls({"B-x", "O"});
  const NerModel one = kgqa::train_perceptron(corpus, ls, 1);
  const NerModel many = kgqa::train_perceptron(corpus, ls, 9);
  std::ostringstream s1, s2;
  kgqa::save_ner_model(s1, one);
  kgqa::save_ner_model(s2, many);
  CHECK(s1.str() == s2.str());
  CHECK(kgqa::mention_f1(one, corpus) == 1.0);
}

TEST_CASE("perceptron learns a single sentence quickly") {
  const std::vector<TaggedSentence> corpus{
      {{"aspirin", "relieves", "pain"}, {"B-drug", "O", "B-symptom"}}};
  const LabelSet ls = kgqa::label_set_from_corpus(corpus);
  const NerModel model = kgqa::train_perceptron(corpus, ls, 5);
  CHECK(kgqa::mention_f1(model, corpus) == 1.0);
}

TEST_CASE("perceptron training validates its inputs") {
  CHECK_THROWS_AS(kgqa::train_perceptron({}, LabelSet({"O"}), 1), kgqa::EmptyCorpus);
  const std::vector<TaggedSentence> corpus{{{"x"}, {"B-drug"}}};
  CHECK_THROWS_AS(kgqa::train_perceptron(corpus, LabelSet({"O"}), 1),
                  kgqa::InvalidBioSequence);
  const std::vector<TaggedSentence> ragged{{{"x", "y"}, {"O"}}};
  CHECK_THROWS_AS(kgqa::train_perceptron(ragged, kgqa::label_set_from_corpus({{{"x"}, {"O"}}}), 1),
                  kgqa::LengthMismatch);
}

TEST_CASE("perceptron fits the bundled corpus inside the recorded epoch budget") {
  const auto corpus = fixture_corpus();
  const LabelSet ls = kgqa::label_set_from_corpus(corpus);
  const auto gaz = std::make_shared<Gazetteer>(toy_graph());

  // the budget recorded in fixtures/manifest.json
  const NerModel at_budget = kgqa::train_perceptron(corpus, ls, 5, gaz);
  CHECK(kgqa::mention_f1(at_budget, corpus) == 1.0);

  // more epochs keep the fit (the update rule is zero once predictions match)
  const NerModel longer = kgqa::train_perceptron(corpus, ls, 50, gaz);
  CHECK(kgqa::mention_f1(longer, corpus) == 1.0);
}

TEST_CASE("training twice from scratch produces byte-identical models") {
  const auto corpus = fixture_corpus();
  const LabelSet ls = kgqa::label_set_from_corpus(corpus);
  const auto gaz = std::make_shared<Gazetteer>(toy_graph());
  std::ostringstream s1, s2;
  kgqa::save_ner_model(s1, kgqa::train_perceptron(corpus, ls, 5, gaz));
  kgqa::save_ner_model(s2, kgqa::train_perceptron(corpus, ls, 5, gaz));
  CHECK(s1.str() == s2.str());
  CHECK(s1.str().rfind("ner-model 1\n", 0) == 0);
}

TEST_CASE("saved models reload with identical behaviour and bytes") {
  const auto corpus = fixture_corpus();
  const LabelSet ls = kgqa::label_set_from_corpus(corpus);
  const auto gaz = std::make_shared<Gazetteer>(toy_graph());
  const NerModel model = kgqa::train_perceptron(corpus, ls, 5, gaz);

  std::ostringstream saved;
  kgqa::save_ner_model(saved, model);
  std::istringstream in(saved.str());
  const NerModel loaded = kgqa::load_ner_model(in, gaz);

  CHECK(loaded.labels.labels() == model.labels.labels());
  CHECK(kgqa::mention_f1(loaded, corpus) == 1.0);
  std::ostringstream resaved;
  kgqa::save_ner_model(resaved, loaded);
  CHECK(resaved.str() == saved.str());
}

TEST_CASE("model loader rejects foreign or truncated files") {
  std::istringstream garbage("not a model\n");
  CHECK_THROWS_AS(kgqa::load_ner_model(garbage), kgqa::ParseFailure);
  std::istringstream truncated("ner-model 1\nlabels 2\nO\n");
  CHECK_THROWS_AS(kgqa::load_ner_model(truncated), kgqa::ParseFailure);
}
