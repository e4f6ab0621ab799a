#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "sentaug/corpus.hpp"

using namespace sentaug;
using testutil::TempDir;
using testutil::norms;

TEST_CASE("tokenize splits on whitespace and lowercases") {
  auto toks = tokenize("I like this movie");
  CHECK(norms(toks) == std::vector<std::string>{"i", "like", "this", "movie"});
  CHECK(toks[0].surface == "I");
}

TEST_CASE("tokenize separates clitics") {
  auto toks = tokenize("michel piccoli's moving performance");
  CHECK(norms(toks) == std::vector<std::string>{"michel", "piccoli", "'s", "moving",
                                                "performance"});
}

TEST_CASE("tokenize splits punctuation into single tokens") {
  auto toks = tokenize("that, by the end, no one cares.");
  CHECK(norms(toks) == std::vector<std::string>{"that", ",", "by", "the", "end", ",", "no",
                                                "one", "cares", "."});
  CHECK(is_punct_token(toks[1]));
  CHECK_FALSE(is_punct_token(toks[0]));
}

TEST_CASE("tokenize rejects blank input") {
  CHECK_THROWS_AS(tokenize("  "), Error);
  CHECK_THROWS_AS(tokenize(""), Error);
}

TEST_CASE("tokenize is deterministic") {
  const std::string text = "A fairly odd, test-case: isn't it?";
  auto a = tokenize(text);
  auto b = tokenize(text);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("detokenize joins surfaces") {
  CHECK(detokenize(tokenize("I like this movie")) == "I like this movie");
}

TEST_CASE("label set validation") {
  LabelSet ok{{"pos", "neg"}, std::nullopt};
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.index_of("pos") == 0);
  CHECK(ok.index_of("neg") == 1);
  CHECK(ok.index_of("AUG") == -1);

  LabelSet with_aug{{"pos", "neg"}, "AUG"};
  CHECK(with_aug.index_of("AUG") == 2);
  CHECK(with_aug.all() == std::vector<std::string>{"pos", "neg", "AUG"});

  LabelSet too_small{{"pos"}, std::nullopt};
  CHECK_THROWS_AS(too_small.validate(), Error);
  LabelSet collision{{"pos", "neg"}, "pos"};
  CHECK_THROWS_AS(collision.validate(), Error);
}

TEST_CASE("load_corpus reads TSV splits") {
  TempDir dir("corpus");
  testutil::write_file(dir.file("toy.train.tsv"),
                       "pos\tI like this movie\n"
                       "# a comment line\n"
                       "neg\tI hate this movie\n"
                       "pos\tgreat fun\n");
  testutil::write_file(dir.file("toy.dev.tsv"), "pos\tfine work\n");
  testutil::write_file(dir.file("toy.test.tsv"), "neg\tawful stuff\n");

  Dataset data = load_corpus(dir.file("toy"), {"pos", "neg"});
  CHECK(data.train.size() == 3);
  CHECK(data.dev.size() == 1);
  CHECK(data.test.size() == 1);
  CHECK(data.train[0].origin == Origin::Original);
  CHECK(data.train[0].id == "train-0");
  CHECK(norms(data.train[0].tokens) == std::vector<std::string>{"i", "like", "this", "movie"});
}

TEST_CASE("load_corpus reports malformed lines") {
  TempDir dir("corpus-bad");
  testutil::write_file(dir.file("bad.train.tsv"), "pos\tok text\nno tab here\n");
  testutil::write_file(dir.file("bad.dev.tsv"), "");
  testutil::write_file(dir.file("bad.test.tsv"), "");
  try {
    load_corpus(dir.file("bad"), {"pos", "neg"});
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
    CHECK(std::string(e.what()).find("TAB") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects unknown labels") {
  TempDir dir("corpus-lbl");
  testutil::write_file(dir.file("bad.train.tsv"), "weird\tsome text\n");
  testutil::write_file(dir.file("bad.test.tsv"), "");
  CHECK_THROWS_WITH_AS(load_corpus(dir.file("bad"), {"pos", "neg"}),
                       doctest::Contains("unknown label"), Error);
}

TEST_CASE("missing dev split is carved from train 90/10") {
  TempDir dir("corpus-dev");
  std::string train;
  for (int i = 0; i < 100; ++i)
    train += (i % 2 ? "pos\tgood text number " : "neg\tbad text number ") + std::to_string(i) +
             "\n";
  testutil::write_file(dir.file("c.train.tsv"), train);
  testutil::write_file(dir.file("c.test.tsv"), "pos\tfine\n");
  Dataset data = load_corpus(dir.file("c"), {"pos", "neg"}, 42);
  CHECK(data.train.size() == 90);
  CHECK(data.dev.size() == 10);
  Dataset again = load_corpus(dir.file("c"), {"pos", "neg"}, 42);
  CHECK(norms(again.dev[3].tokens) == norms(data.dev[3].tokens));
}

TEST_CASE("corpus round-trips byte-identically") {
  TempDir dir("corpus-rt");
  SynthConfig cfg;
  cfg.count = 60;
  cfg.vocab_size = 50;
  cfg.n_pos_words = 5;
  cfg.n_neg_words = 5;
  Dataset data = synth_corpus(cfg, 3).dataset;
  write_corpus(data, dir.file("a"));
  Dataset loaded = load_corpus(dir.file("a"), {"pos", "neg"});
  write_corpus(loaded, dir.file("b"));
  for (const char* split : {".train.tsv", ".dev.tsv", ".test.tsv"})
    CHECK(testutil::read_file(dir.file("a") + split) == testutil::read_file(dir.file("b") + split));
}

TEST_CASE("dataset validation enforces test purity") {
  Dataset data;
  data.labels.base = {"pos", "neg"};
  data.labels.aug = "AUG";
  data.train.push_back(testutil::make_example("train-0", "fine words", "pos"));
  Example bad = testutil::make_example("test-0", "oops", "AUG");
  bad.origin = Origin::AugEk;
  bad.source_id = "train-0";
  data.test.push_back(bad);
  CHECK_THROWS_WITH_AS(data.validate(), doctest::Contains("augmented"), Error);
}

TEST_CASE("synth corpus: empty count gives empty dataset") {
  SynthConfig cfg;
  cfg.count = 0;
  SynthResult res = synth_corpus(cfg, 1);
  CHECK(res.dataset.train.empty());
  CHECK(res.dataset.dev.empty());
  CHECK(res.dataset.test.empty());
  CHECK(res.dataset.labels.base.size() == 2);
}

TEST_CASE("synth corpus is seed-deterministic") {
  SynthConfig cfg;
  cfg.count = 40;
  auto a = synth_corpus(cfg, 9);
  auto b = synth_corpus(cfg, 9);
  REQUIRE(a.dataset.train.size() == b.dataset.train.size());
  for (size_t i = 0; i < a.dataset.train.size(); ++i) {
    CHECK(a.dataset.train[i].label == b.dataset.train[i].label);
    CHECK(norms(a.dataset.train[i].tokens) == norms(b.dataset.train[i].tokens));
  }
  auto c = synth_corpus(cfg, 10);
  bool any_diff = false;
  for (size_t i = 0; i < a.dataset.train.size(); ++i)
    any_diff |= norms(a.dataset.train[i].tokens) != norms(c.dataset.train[i].tokens);
  CHECK(any_diff);
}

TEST_CASE("synth corpus balance matches the alternating schedule") {
  SynthConfig cfg;  // defaults: count=2000, 20+20 planted words
  SynthResult res = synth_corpus(cfg, 1);
  size_t pos = 0, total = 0;
  for (const auto* split : {&res.dataset.train, &res.dataset.dev, &res.dataset.test}) {
    for (const auto& e : *split) {
      pos += e.label == kPosLabel;
      ++total;
    }
  }
  CHECK(total == 2000);
  // the schedule alternates labels, so exactly half are positive
  CHECK(pos == 1000);
  double ratio = static_cast<double>(pos) / static_cast<double>(total);
  CHECK(ratio >= 0.45);
  CHECK(ratio <= 0.55);
}

TEST_CASE("synth sentences contain planted words matching the label") {
  SynthConfig cfg;
  cfg.count = 300;
  SynthResult res = synth_corpus(cfg, 5);
  std::set<std::string> pos(res.pos_words.begin(), res.pos_words.end());
  std::set<std::string> neg(res.neg_words.begin(), res.neg_words.end());
  for (const auto& w : res.pos_words) CHECK_FALSE(neg.count(w));
  for (const auto* split : {&res.dataset.train, &res.dataset.dev, &res.dataset.test}) {
    for (const auto& e : *split) {
      int n_pos = 0, n_neg = 0;
      for (const auto& t : e.tokens) {
        n_pos += pos.count(t.norm) > 0;
        n_neg += neg.count(t.norm) > 0;
      }
      CHECK(n_pos + n_neg >= 1);
      if (e.label == kPosLabel)
        CHECK(n_pos > n_neg);
      else
        CHECK(n_neg > n_pos);
      CHECK(e.tokens.size() >= static_cast<size_t>(cfg.len_min));
      CHECK(e.tokens.size() <= static_cast<size_t>(cfg.len_max));
    }
  }
}

TEST_CASE("synth config validation") {
  SynthConfig overlap;
  overlap.n_pos_words = 1;
  overlap.n_neg_words = 1;
  overlap.pos_words = {"same"};
  overlap.neg_words = {"same"};
  CHECK_THROWS_WITH_AS(synth_corpus(overlap, 1), doctest::Contains("both planted lists"), Error);

  SynthConfig bad_len;
  bad_len.len_min = 5;
  bad_len.len_max = 3;
  CHECK_THROWS_AS(synth_corpus(bad_len, 1), Error);
}

TEST_CASE("load_synth_config parses key = value files") {
  TempDir dir("synthcfg");
  testutil::write_file(dir.file("s.cfg"),
                       "# comment\nvocab_size = 80\nn_pos_words = 6\nn_neg_words = 6\n"
                       "len_min = 4\nlen_max = 9\ncount = 120\nseed = 77\n");
  SynthConfig cfg = load_synth_config(dir.file("s.cfg"));
  CHECK(cfg.vocab_size == 80);
  CHECK(cfg.count == 120);
  CHECK(cfg.seed == 77);
  testutil::write_file(dir.file("bad.cfg"), "nonsense_key = 3\n");
  CHECK_THROWS_WITH_AS(load_synth_config(dir.file("bad.cfg")), doctest::Contains("unknown key"),
                       Error);
}

TEST_CASE("build_vocab indexes by frequency with specials first") {
  Dataset data;
  data.labels.base = {"pos", "neg"};
  data.train.push_back(testutil::make_example("train-0", "a b", "pos"));
  data.train.push_back(testutil::make_example("train-1", "b c", "neg"));

  Vocabulary v1 = build_vocab(data, 1);
  CHECK(v1.words == std::vector<std::string>{"<pad>", "<unk>", "b", "a", "c"});
  CHECK(v1.id("b") == 2);
  CHECK(v1.id("zzz") == Vocabulary::kUnk);
  CHECK(Vocabulary::kPad == 0);

  Vocabulary v2 = build_vocab(data, 2);
  CHECK(v2.words == std::vector<std::string>{"<pad>", "<unk>", "b"});

  Dataset empty;
  empty.labels.base = {"pos", "neg"};
  CHECK_THROWS_AS(build_vocab(empty, 1), Error);
}

TEST_CASE("vocab file round trip preserves hash") {
  TempDir dir("vocab");
  Dataset data;
  data.labels.base = {"pos", "neg"};
  data.train.push_back(testutil::make_example("train-0", "x y z y", "pos"));
  Vocabulary v = build_vocab(data, 1);
  write_vocab(v, dir.file("vocab.tsv"));
  Vocabulary w = load_vocab(dir.file("vocab.tsv"));
  CHECK(v.words == w.words);
  CHECK(v.hash() == w.hash());
}
