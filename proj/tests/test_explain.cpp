#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "sentaug/explain.hpp"
#include "sentaug/rng.hpp"

using namespace sentaug;

namespace {

std::vector<Token> unique_tokens(int n) {
  std::vector<Token> toks;
  for (int i = 0; i < n; ++i) toks.push_back(make_token("w" + std::to_string(i)));
  return toks;
}

// Decision scores exactly linear in the presence mask: h(z, y) = coef_y . z + b_y.
// represent() returns the mask itself so the proximity weights are well defined.
struct MaskLinearModel : Classifier {
  Eigen::MatrixXd coef;  // L x n
  Eigen::VectorXd bias;  // L
  std::map<std::string, int> position;
  LabelSet label_set{{"pos", "neg"}, std::nullopt};

  MaskLinearModel(const std::vector<Token>& tokens, Eigen::MatrixXd c, Eigen::VectorXd b)
      : coef(std::move(c)), bias(std::move(b)) {
    for (size_t i = 0; i < tokens.size(); ++i) position[tokens[i].norm] = static_cast<int>(i);
  }
  Eigen::VectorXd represent(const std::vector<Token>& tokens) const override {
    Eigen::VectorXd mask = Eigen::VectorXd::Zero(coef.cols());
    for (const auto& t : tokens) mask[position.at(t.norm)] = 1.0;
    return mask;
  }
  Eigen::VectorXd decide(const Eigen::VectorXd& mask) const override {
    return coef * mask + bias;
  }
  const LabelSet& labels() const override { return label_set; }
};

std::vector<std::vector<uint8_t>> enumerate_masks(int n) {
  std::vector<std::vector<uint8_t>> masks;
  for (unsigned bits = 1; bits < (1u << n); ++bits) {  // skip the empty mask
    std::vector<uint8_t> m(n);
    for (int i = 0; i < n; ++i) m[i] = (bits >> i) & 1u;
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace

TEST_CASE("perturbation masks keep at least one token") {
  auto toks = unique_tokens(1);
  PerturbationSet set = sample_perturbations(toks, 25, 3);
  REQUIRE(set.masks.size() == 25);
  for (const auto& m : set.masks) CHECK(m == std::vector<uint8_t>{1});

  auto longer = unique_tokens(9);
  PerturbationSet big = sample_perturbations(longer, 500, 4);
  std::set<size_t> kept_counts;
  for (const auto& m : big.masks) {
    size_t kept = 0;
    for (auto b : m) kept += b;
    CHECK(kept >= 1);
    kept_counts.insert(kept);
  }
  // deletion counts 0..n-1 all occur over 500 draws
  CHECK(kept_counts.size() == 9);
}

TEST_CASE("perturbation sampling is seed-deterministic") {
  auto toks = unique_tokens(7);
  auto a = sample_perturbations(toks, 40, 9);
  auto b = sample_perturbations(toks, 40, 9);
  CHECK(a.masks == b.masks);
  auto c = sample_perturbations(toks, 40, 10);
  CHECK(a.masks != c.masks);
  CHECK_THROWS_AS(sample_perturbations(toks, 0, 1), Error);
}

TEST_CASE("apply_mask keeps order") {
  auto toks = tokenize("one two three four");
  std::vector<uint8_t> mask{1, 0, 0, 1};
  auto out = apply_mask(toks, mask);
  REQUIRE(out.size() == 2);
  CHECK(out[0].norm == "one");
  CHECK(out[1].norm == "four");
}

TEST_CASE("proximity kernel") {
  Eigen::VectorXd x(2), same(2), orth(2), zero(2);
  x << 1, 0;
  same << 2, 0;
  orth << 0, 1;
  zero << 0, 0;
  CHECK(proximity(x, x, 10.0) == doctest::Approx(1.0));
  CHECK(proximity(x, same, 10.0) == doctest::Approx(1.0));  // dist 0 despite scaling
  CHECK(proximity(x, orth, 10.0) == doctest::Approx(std::exp(-0.1)));
  CHECK(proximity(x, zero, 10.0) == doctest::Approx(std::exp(-0.1)));  // zero vector: dist 1
  CHECK_THROWS_AS(proximity(zero, x, 10.0), Error);

  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(3), b(3);
    for (int i = 0; i < 3; ++i) {
      a[i] = rng.next_real(-1, 1);
      b[i] = rng.next_real(-1, 1);
    }
    if (a.norm() == 0) continue;
    double p = proximity(a, b, 10.0);
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("paper defaults are wired in") {
  LimeConfig cfg;
  CHECK(cfg.q == 600);
  CHECK(cfg.sigma2 == doctest::Approx(10.0));
  CHECK(cfg.epochs == 50);
}

TEST_CASE("closed form recovers an exactly linear decision function") {
  const int n = 8;
  auto toks = unique_tokens(n);
  Rng rng(21);
  Eigen::MatrixXd coef(2, n);
  Eigen::VectorXd bias(2);
  for (int y = 0; y < 2; ++y) {
    bias[y] = rng.next_real(-1, 1);
    for (int i = 0; i < n; ++i) coef(y, i) = rng.next_real(-2, 2);
  }
  MaskLinearModel model(toks, coef, bias);

  LimeConfig cfg;
  cfg.ridge = 1e-10;
  auto masks = enumerate_masks(n);
  LimeSurrogate fit = fit_lime_closed_form(model, toks, masks, cfg);
  CHECK(fit.final_residual < 1e-8);
  for (int y = 0; y < 2; ++y) {
    CHECK(std::abs(fit.intercepts[y] - bias[y]) < 1e-3);
    for (int i = 0; i < n; ++i) CHECK(std::abs(fit.weights(y, i) - coef(y, i)) < 1e-3);
  }
}

TEST_CASE("gradient descent matches the closed-form oracle") {
  const int n = 6;
  auto toks = unique_tokens(n);
  Rng rng(22);
  Eigen::MatrixXd coef(2, n);
  Eigen::VectorXd bias(2);
  for (int y = 0; y < 2; ++y) {
    bias[y] = rng.next_real(-1, 1);
    for (int i = 0; i < n; ++i) coef(y, i) = rng.next_real(-2, 2);
  }
  MaskLinearModel model(toks, coef, bias);

  LimeConfig cfg;
  cfg.ridge = 1e-10;
  cfg.epochs = 4000;
  auto masks = enumerate_masks(n);
  LimeSurrogate gd = fit_lime_with_masks(model, toks, masks, cfg);
  LimeSurrogate exact = fit_lime_closed_form(model, toks, masks, cfg);
  for (int y = 0; y < 2; ++y)
    for (int i = 0; i < n; ++i) CHECK(std::abs(gd.weights(y, i) - exact.weights(y, i)) < 1e-3);

  // keyword ranking agrees between the two solvers
  Explanation eg = explain_lime(gd, model.labels(), "pos", 3, toks);
  Explanation ee = explain_lime(exact, model.labels(), "pos", 3, toks);
  REQUIRE(eg.keywords.size() == ee.keywords.size());
  for (size_t k = 0; k < eg.keywords.size(); ++k)
    CHECK(eg.keywords[k].position == ee.keywords[k].position);
}

TEST_CASE("a constant decision function yields zero weights") {
  const int n = 5;
  auto toks = unique_tokens(n);
  MaskLinearModel model(toks, Eigen::MatrixXd::Zero(2, n), Eigen::VectorXd::Constant(2, 3.25));
  LimeConfig cfg;
  cfg.ridge = 1e-10;
  LimeSurrogate fit = fit_lime_closed_form(model, toks, enumerate_masks(n), cfg);
  for (int i = 0; i < n; ++i) CHECK(std::abs(fit.weights(0, i)) < 1e-6);
  CHECK(fit.intercepts[0] == doctest::Approx(3.25));
  CHECK(fit.final_residual < 1e-12);
}

TEST_CASE("sampled LIME fit is deterministic and finite") {
  const int n = 7;
  auto toks = unique_tokens(n);
  Rng rng(23);
  Eigen::MatrixXd coef(2, n);
  for (int y = 0; y < 2; ++y)
    for (int i = 0; i < n; ++i) coef(y, i) = rng.next_real(-1, 1);
  MaskLinearModel model(toks, coef, Eigen::VectorXd::Zero(2));
  LimeConfig cfg;
  cfg.q = 200;
  cfg.seed = 77;
  LimeSurrogate a = fit_lime(model, toks, cfg);
  LimeSurrogate b = fit_lime(model, toks, cfg);
  CHECK((a.weights - b.weights).norm() == 0.0);
  CHECK(a.final_loss == b.final_loss);
  CHECK(std::isfinite(a.final_loss));
}

TEST_CASE("explain_lime ranking rules") {
  auto toks = unique_tokens(4);
  LimeSurrogate fit;
  fit.weights.resize(2, 4);
  fit.weights << 0.1, 0.9, 0.5, 0.9,  // pos: tie between positions 1 and 3
      0.0, 0.0, 0.0, 0.0;
  fit.intercepts = Eigen::VectorXd::Zero(2);
  LabelSet labels{{"pos", "neg"}, std::nullopt};

  Explanation top2 = explain_lime(fit, labels, "pos", 2, toks);
  REQUIRE(top2.keywords.size() == 2);
  CHECK(top2.keywords[0].position == 1);  // tie broken by position order
  CHECK(top2.keywords[1].position == 3);

  Explanation all = explain_lime(fit, labels, "pos", 10, toks);
  CHECK(all.keywords.size() == 4);  // t >= n keeps everything, sorted
  for (size_t k = 1; k < all.keywords.size(); ++k)
    CHECK(all.keywords[k - 1].weight >= all.keywords[k].weight);

  // all-equal weights fall back to position order
  fit.weights.row(0).setConstant(0.5);
  Explanation ties = explain_lime(fit, labels, "pos", 3, toks);
  CHECK(ties.keywords[0].position == 0);
  CHECK(ties.keywords[1].position == 1);
  CHECK(ties.keywords[2].position == 2);

  CHECK_THROWS_AS(explain_lime(fit, labels, "pos", 0, toks), Error);
  CHECK_THROWS_AS(explain_lime(fit, labels, "nope", 3, toks), Error);
}

TEST_CASE("cosine-similarity explanations") {
  // mean-pooling toy encoder: f(x) = mean of fixed word vectors
  struct MeanModel : Classifier {
    std::map<std::string, Eigen::Vector3d> vecs;
    LabelSet label_set{{"pos", "neg"}, std::nullopt};
    Eigen::VectorXd represent(const std::vector<Token>& tokens) const override {
      Eigen::Vector3d sum = Eigen::Vector3d::Zero();
      for (const auto& t : tokens) sum += vecs.at(t.norm);
      return sum / static_cast<double>(tokens.size());
    }
    Eigen::VectorXd decide(const Eigen::VectorXd& repr) const override {
      Eigen::VectorXd s(2);
      s << repr.sum(), -repr.sum();
      return s;
    }
    const LabelSet& labels() const override { return label_set; }
  };
  MeanModel model;
  model.vecs["alpha"] = {1.0, 0.2, 0.0};
  model.vecs["beta"] = {0.0, 1.0, 0.4};

  // single-word sentence: the word matches its own representation exactly
  Explanation solo = explain_cossim(model, {make_token("alpha")}, 3);
  REQUIRE(solo.keywords.size() == 1);
  CHECK(solo.keywords[0].weight == doctest::Approx(1.0));

  // two words: the one at the smaller angle to the mean ranks first
  auto toks = tokenize("alpha beta");
  Eigen::Vector3d mean = (model.vecs["alpha"] + model.vecs["beta"]) / 2.0;
  auto angle = [&](const Eigen::Vector3d& v) {
    return std::acos(v.dot(mean) / (v.norm() * mean.norm()));
  };
  const std::string expected_first =
      angle(model.vecs["alpha"]) < angle(model.vecs["beta"]) ? "alpha" : "beta";
  Explanation pair = explain_cossim(model, toks, 2);
  REQUIRE(pair.keywords.size() == 2);
  CHECK(pair.keywords[0].token == expected_first);
  CHECK(pair.keywords[0].weight >= pair.keywords[1].weight);

  // duplicate words receive identical similarities
  Explanation dup = explain_cossim(model, tokenize("alpha beta alpha"), 3);
  double w0 = -1, w2 = -2;
  for (const auto& k : dup.keywords) {
    if (k.position == 0) w0 = k.weight;
    if (k.position == 2) w2 = k.weight;
  }
  CHECK(w0 == doctest::Approx(w2));

  // cosine ranking is invariant to positive rescaling of the representation
  MeanModel scaled = model;
  for (auto& [w, v] : scaled.vecs) v *= 7.3;
  Explanation a = explain_cossim(model, toks, 2);
  Explanation b = explain_cossim(scaled, toks, 2);
  for (size_t k = 0; k < a.keywords.size(); ++k)
    CHECK(a.keywords[k].position == b.keywords[k].position);

  CHECK_THROWS_AS(explain_cossim(model, {}, 3), Error);
  CHECK_THROWS_AS(explain_cossim(model, toks, 0), Error);
}

TEST_CASE("explanation log round trip") {
  testutil::TempDir dir("expl");
  std::vector<Explanation> expls(2);
  expls[0].example_id = "test-0";
  expls[0].method = ExplainMethod::Lime;
  expls[0].model_tag = "cnn-base";
  expls[0].prediction = "pos";
  expls[0].gold = "neg";
  expls[0].keywords = {{"fine", 2, 0.75}, {"stuff", 0, 0.25}};
  expls[1].example_id = "test-1";
  expls[1].method = ExplainMethod::CosSim;
  expls[1].model_tag = "cnn-base";
  expls[1].prediction = "neg";
  expls[1].gold = "neg";
  expls[1].keywords = {{"poor", 1, 0.9}};

  write_explanations(dir.file("e.jsonl"), expls);
  auto loaded = read_explanations(dir.file("e.jsonl"));
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].example_id == "test-0");
  CHECK(loaded[0].method == ExplainMethod::Lime);
  CHECK(loaded[0].keywords[0].token == "fine");
  CHECK(loaded[0].keywords[0].position == 2);
  CHECK(loaded[0].keywords[0].weight == doctest::Approx(0.75));
  CHECK(loaded[1].prediction == "neg");

  testutil::write_file(dir.file("bad.jsonl"), "not json\n");
  CHECK_THROWS_WITH_AS(read_explanations(dir.file("bad.jsonl")), doctest::Contains(":1"), Error);
}
