#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "sentaug/lexicon.hpp"
#include "sentaug/rng.hpp"

using namespace sentaug;

namespace {

// Hand-built fixture in the documented SentiWordNet 3.0 line grammar.
const char* kFixture =
    "# SentiWordNet v3.0\n"
    "# POS\tID\tPosScore\tNegScore\tSynsetTerms\tGloss\n"
    "a\t00001740\t0.125\t0\table#1\t(usually followed by `to') having the necessary means\n"
    "a\t00002098\t0\t0.75\tunable#1\t(usually followed by `to') not having the necessary means\n"
    "r\t00039318\t0.625\t0\ttruly#1\tin accordance with truth or fact or reality\n";

std::vector<RawSynsetEntry> parse_string(const std::string& s) {
  std::istringstream in(s);
  return parse_sentiwordnet(in);
}

RawSynsetEntry entry(double pos, double neg, std::vector<std::string> lemmas, long id = 1) {
  RawSynsetEntry e;
  e.pos_tag = 'a';
  e.synset_id = id;
  e.pos_score = pos;
  e.neg_score = neg;
  for (const auto& l : lemmas) e.terms.emplace_back(l, 1);
  return e;
}

}  // namespace

TEST_CASE("comment-only stream parses to an empty list") {
  CHECK(parse_string("# only comments\n# here\n").empty());
}

TEST_CASE("parses the documented line grammar") {
  auto entries = parse_string(kFixture);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].pos_tag == 'a');
  CHECK(entries[0].synset_id == 1740);
  CHECK(entries[0].pos_score == doctest::Approx(0.125));
  CHECK(entries[0].neg_score == doctest::Approx(0.0));
  REQUIRE(entries[0].terms.size() == 1);
  CHECK(entries[0].terms[0].first == "able");
  CHECK(entries[0].terms[0].second == 1);
  CHECK(entries[2].terms[0].first == "truly");
}

TEST_CASE("multi-term synsets split on spaces") {
  auto entries = parse_string("a\t1\t0.5\t0\tgood#1 well#3\tgloss text\n");
  REQUIRE(entries.size() == 1);
  REQUIRE(entries[0].terms.size() == 2);
  CHECK(entries[0].terms[1] == std::pair<std::string, int>{"well", 3});
}

TEST_CASE("scores outside [0,1] are rejected with line numbers") {
  CHECK_THROWS_WITH_AS(parse_string("a\t1\t1.5\t0\tok#1\tg\n"), doctest::Contains("line 1"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_string("# c\na\t1\t0\t-0.1\tok#1\tg\n"), doctest::Contains("line 2"),
                       Error);
  CHECK_THROWS_AS(parse_string("a\t1\t0.8\t0.8\tok#1\tg\n"), Error);  // pos + neg > 1
}

TEST_CASE("malformed lines are rejected") {
  CHECK_THROWS_WITH_AS(parse_string("a\t1\t0.5\n"), doctest::Contains("6 tab-separated"), Error);
  CHECK_THROWS_WITH_AS(parse_string("x\t1\t0.5\t0\tok#1\tg\n"), doctest::Contains("POS tag"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_string("a\t1\t0.5\t0\tnohash\tg\n"),
                       doctest::Contains("lemma#rank"), Error);
  CHECK_THROWS_WITH_AS(parse_string("a\t1\tx\t0\tok#1\tg\n"), doctest::Contains("non-numeric"),
                       Error);
}

TEST_CASE("aggregate reproduces the single-synset scores") {
  auto lex = aggregate({entry(0.625, 0, {"truly"})}, AggregatePolicy::MeanAllSenses);
  auto score = lex.lookup("truly");
  REQUIRE(score);
  CHECK(score->positive == doctest::Approx(0.625));
  CHECK(score->negative == doctest::Approx(0.0));
  CHECK(score->neutral == doctest::Approx(0.375));
}

TEST_CASE("aggregate means over all synsets of a lemma") {
  auto lex = aggregate({entry(0.5, 0, {"w"}, 1), entry(0, 0.5, {"w"}, 2)},
                       AggregatePolicy::MeanAllSenses);
  auto s = lex.lookup("w");
  REQUIRE(s);
  CHECK(s->positive == doctest::Approx(0.25));
  CHECK(s->negative == doctest::Approx(0.25));
  CHECK(s->neutral == doctest::Approx(0.5));
}

TEST_CASE("all-zero synsets give the fully neutral score") {
  auto lex = aggregate({entry(0, 0, {"a"})}, AggregatePolicy::MeanAllSenses);
  auto s = lex.lookup("a");
  REQUIRE(s);
  CHECK(s->positive == 0.0);
  CHECK(s->negative == 0.0);
  CHECK(s->neutral == 1.0);
}

TEST_CASE("scores always sum to one") {
  Rng rng(11);
  std::vector<RawSynsetEntry> entries;
  for (int i = 0; i < 200; ++i) {
    double p = rng.next_real(0, 0.7);
    double n = rng.next_real(0, 1.0 - p);
    entries.push_back(entry(p, n, {"lemma" + std::to_string(i % 37)}, i));
  }
  auto lex = aggregate(entries, AggregatePolicy::MeanAllSenses);
  for (int i = 0; i < 37; ++i) {
    auto s = lex.lookup("lemma" + std::to_string(i));
    REQUIRE(s);
    CHECK(std::abs(s->positive + s->negative + s->neutral - 1.0) < 1e-9);
  }
}

TEST_CASE("aggregate is order independent") {
  Rng rng(13);
  std::vector<RawSynsetEntry> entries;
  for (int i = 0; i < 100; ++i)
    entries.push_back(
        entry(rng.next_real(0, 0.5), rng.next_real(0, 0.5), {"w" + std::to_string(i % 11)}, i));
  auto lex1 = aggregate(entries, AggregatePolicy::MeanAllSenses);
  std::shuffle(entries.begin(), entries.end(), std::mt19937_64(99));
  auto lex2 = aggregate(entries, AggregatePolicy::MeanAllSenses);
  for (int i = 0; i < 11; ++i) {
    auto a = lex1.lookup("w" + std::to_string(i));
    auto b = lex2.lookup("w" + std::to_string(i));
    REQUIRE(a);
    REQUIRE(b);
    // bitwise identical, not merely close
    CHECK(a->positive == b->positive);
    CHECK(a->negative == b->negative);
    CHECK(a->neutral == b->neutral);
  }
}

TEST_CASE("lookup is total") {
  auto lex = aggregate({entry(0.625, 0, {"truly"}), entry(0, 0, {"a"})},
                       AggregatePolicy::MeanAllSenses);
  CHECK(lex.lookup("truly"));
  CHECK(lex.lookup("a"));
  CHECK_FALSE(lex.lookup("zzzz"));
  CHECK_FALSE(lex.lookup(make_token("Zzzz")));
  CHECK(lex.lookup(make_token("TRULY")));  // lookup goes through the norm
}

TEST_CASE("sentiment-word membership uses the threshold") {
  auto lex = aggregate({entry(0.625, 0, {"truly"}), entry(0, 0, {"a"}),
                        entry(0.05, 0.01, {"weak"})},
                       AggregatePolicy::MeanAllSenses, 0.1);
  CHECK(lex.is_sentiment_word(make_token("truly")));
  CHECK_FALSE(lex.is_sentiment_word(make_token("a")));
  CHECK_FALSE(lex.is_sentiment_word(make_token("weak")));
  CHECK_FALSE(lex.is_sentiment_word(make_token("absent")));

  lex.set_membership_threshold(0.0);
  CHECK(lex.is_sentiment_word(make_token("weak")));
  CHECK(lex.is_sentiment_word(make_token("a")));  // tau = 0 disables the bar entirely
}

TEST_CASE("raising tau never grows the sentiment-word set") {
  Rng rng(17);
  std::vector<RawSynsetEntry> entries;
  std::vector<std::string> lemmas;
  for (int i = 0; i < 60; ++i) {
    lemmas.push_back("m" + std::to_string(i));
    double p = rng.next_real(0, 0.6);
    entries.push_back(entry(p, rng.next_real(0, 1.0 - p), {lemmas.back()}, i));
  }
  auto lex = aggregate(entries, AggregatePolicy::MeanAllSenses);
  size_t prev = lemmas.size() + 1;
  for (double tau : {0.0, 0.1, 0.25, 0.5, 0.9}) {
    lex.set_membership_threshold(tau);
    size_t count = 0;
    for (const auto& l : lemmas) count += lex.is_sentiment_word(make_token(l));
    CHECK(count <= prev);
    prev = count;
  }
}

TEST_CASE("simple 3-column lexicon round trip and auto-detection") {
  testutil::TempDir dir("lex");
  {
    std::ofstream out(dir.file("simple.tsv"));
    write_simple_lexicon(out, {{"good", 0.8, 0.0}, {"bad", 0.0, 0.8}});
  }
  SentimentLexicon lex = load_lexicon(dir.file("simple.tsv"), 0.1);
  CHECK(lex.size() == 2);
  auto s = lex.lookup("good");
  REQUIRE(s);
  CHECK(s->positive == doctest::Approx(0.8));
  CHECK(lex.is_sentiment_word(make_token("bad")));

  testutil::write_file(dir.file("swn.tsv"), kFixture);
  SentimentLexicon swn = load_lexicon(dir.file("swn.tsv"), 0.1);
  CHECK(swn.size() == 3);
  CHECK(swn.lookup("truly")->positive == doctest::Approx(0.625));
}
