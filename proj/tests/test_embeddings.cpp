#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "sentaug/embeddings.hpp"
#include "sentaug/rng.hpp"

using namespace sentaug;

namespace {

Vocabulary vocab_of(const std::vector<std::string>& words) {
  Dataset data;
  data.labels.base = {"pos", "neg"};
  Example e;
  e.id = "train-0";
  e.label = "pos";
  for (const auto& w : words) e.tokens.push_back(make_token(w));
  data.train.push_back(e);
  return build_vocab(data, 1);
}

EmbeddingTable load_from_string(const std::string& text, const Vocabulary& vocab,
                                uint64_t oov_seed = 1) {
  std::istringstream in(text);
  return EmbeddingTable::load_text(in, vocab, oov_seed);
}

// independent cosine for the oracle checks
double cos_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST_CASE("loads a plain text embedding file") {
  auto vocab = vocab_of({"alpha", "beta"});
  auto table = load_from_string("alpha 1 0 0\nbeta 0 1 0\n", vocab);
  CHECK(table.dim() == 3);
  CHECK(table.contains("alpha"));
  CHECK(table.vector("alpha")[0] == doctest::Approx(1.0));
  CHECK(table.vector("beta")[1] == doctest::Approx(1.0));
}

TEST_CASE("accepts the optional count/dim header") {
  auto vocab = vocab_of({"alpha", "beta"});
  auto table = load_from_string("2 3\nalpha 1 0 0\nbeta 0 1 0\n", vocab);
  CHECK(table.dim() == 3);
  CHECK(table.vector("beta")[1] == doctest::Approx(1.0));
}

TEST_CASE("vocab words missing from the file get seeded values in range") {
  auto vocab = vocab_of({"alpha", "beta", "gamma"});
  auto table = load_from_string("alpha 1 0 0\n", vocab, 42);
  REQUIRE(table.contains("gamma"));
  Eigen::VectorXd v = table.vector("gamma");
  for (int j = 0; j < 3; ++j) {
    CHECK(v[j] >= -0.25);
    CHECK(v[j] <= 0.25);
  }
  auto again = load_from_string("alpha 1 0 0\n", vocab, 42);
  CHECK((again.vector("gamma") - v).norm() == 0.0);
  auto other_seed = load_from_string("alpha 1 0 0\n", vocab, 43);
  CHECK((other_seed.vector("gamma") - v).norm() != 0.0);
}

TEST_CASE("dimension mismatches and junk are rejected") {
  auto vocab = vocab_of({"alpha", "beta"});
  CHECK_THROWS_WITH_AS(load_from_string("alpha 1 0 0\nbeta 0 1\n", vocab),
                       doctest::Contains("expected 3 components"), Error);
  CHECK_THROWS_WITH_AS(load_from_string("alpha 1 zork 0\n", vocab),
                       doctest::Contains("non-numeric"), Error);
  CHECK_THROWS_AS(load_from_string("", vocab), Error);
}

TEST_CASE("nearest neighbors match a brute-force oracle") {
  std::vector<std::string> words{"a", "b", "c", "d"};
  std::vector<std::vector<double>> vecs{
      {1.0, 0.1, 0.0}, {0.9, 0.2, 0.1}, {-1.0, 0.0, 0.3}, {0.0, 1.0, 0.0}};
  Eigen::MatrixXd rows(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) rows(i, j) = vecs[i][j];
  EmbeddingTable table(words, rows);

  auto nn = table.nearest_neighbors("a", 1);
  REQUIRE(nn.size() == 1);
  // oracle: argmax over all other words by cosine
  std::string best;
  double best_sim = -2;
  for (int i = 1; i < 4; ++i) {
    double s = cos_oracle(vecs[0], vecs[i]);
    if (s > best_sim) {
      best_sim = s;
      best = words[i];
    }
  }
  CHECK(nn[0].first == best);
  CHECK(nn[0].second == doctest::Approx(best_sim));
}

TEST_CASE("a word is never its own neighbor and k clamps to the table") {
  std::vector<std::string> words{"a", "b", "c"};
  Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(3, 3);
  EmbeddingTable table(words, rows);
  auto nn = table.nearest_neighbors("b", 10);
  CHECK(nn.size() == 2);
  for (const auto& [w, s] : nn) CHECK(w != "b");
  // identical similarities tie-break lexicographically
  CHECK(nn[0].first == "a");
  CHECK(nn[1].first == "c");
  CHECK_THROWS_AS(table.nearest_neighbors("zzz", 1), Error);
}

TEST_CASE("cosine basics") {
  Eigen::VectorXd v(3);
  v << 0.3, -1.2, 0.5;
  CHECK(cosine(v, v) == doctest::Approx(1.0));
  CHECK(cosine(v, Eigen::VectorXd(-v)) == doctest::Approx(-1.0));
  CHECK(cosine(v, Eigen::VectorXd::Zero(3)) == 0.0);
}

TEST_CASE("neighbor ordering is invariant to uniform positive scaling") {
  Rng rng(5);
  std::vector<std::string> words;
  Eigen::MatrixXd rows(12, 6);
  for (int i = 0; i < 12; ++i) {
    words.push_back("w" + std::to_string(i));
    for (int j = 0; j < 6; ++j) rows(i, j) = rng.next_real(-1, 1);
  }
  EmbeddingTable a(words, rows);
  EmbeddingTable b(words, Eigen::MatrixXd(rows * 3.7));
  for (const auto& w : words) {
    auto na = a.nearest_neighbors(w, 5);
    auto nb = b.nearest_neighbors(w, 5);
    REQUIRE(na.size() == nb.size());
    for (size_t k = 0; k < na.size(); ++k) CHECK(na[k].first == nb[k].first);
  }
}

TEST_CASE("binary cache round trip") {
  testutil::TempDir dir("emb");
  auto vocab = vocab_of({"alpha", "beta", "gamma"});
  auto table = load_from_string("alpha 1 0 0\nbeta 0 1 0\n", vocab, 7);
  table.save_cache(dir.file("t.emb"));
  auto loaded = EmbeddingTable::load_cache(dir.file("t.emb"));
  CHECK(loaded.dim() == table.dim());
  CHECK(loaded.words() == table.words());
  for (const auto& w : table.words()) CHECK((loaded.vector(w) - table.vector(w)).norm() == 0.0);

  // load_file auto-detects both formats
  auto via_auto = EmbeddingTable::load_file(dir.file("t.emb"), vocab, 7);
  CHECK(via_auto.words() == table.words());
  table.save_text(dir.file("t.txt"));
  auto via_text = EmbeddingTable::load_file(dir.file("t.txt"), vocab, 7);
  CHECK(via_text.words() == table.words());
}
