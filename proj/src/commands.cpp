#include "sentaug/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sentaug/attack.hpp"
#include "sentaug/augment.hpp"
#include "sentaug/corpus.hpp"
#include "sentaug/embeddings.hpp"
#include "sentaug/evaluate.hpp"
#include "sentaug/explain.hpp"
#include "sentaug/lexicon.hpp"
#include "sentaug/model.hpp"
#include "sentaug/rng.hpp"

namespace fs = std::filesystem;

namespace sentaug {

RunConfig RunConfig::from_file(const std::string& path) {
  RunConfig cfg;
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": expected key = value");
    cfg.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set_default(const std::string& key, const std::string& value) {
  values_.emplace(key, value);
}

const std::string& RunConfig::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error("missing required setting '" + key + "'");
  return it->second;
}

std::string RunConfig::str(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int64_t RunConfig::integer(const std::string& key, int64_t fallback) {
  set_default(key, std::to_string(fallback));
  try {
    return std::stoll(str(key));
  } catch (const std::exception&) {
    throw Error("setting '" + key + "' is not an integer: " + str(key));
  }
}

double RunConfig::real(const std::string& key, double fallback) {
  set_default(key, fmt_real(fallback));
  try {
    return std::stod(str(key));
  } catch (const std::exception&) {
    throw Error("setting '" + key + "' is not a number: " + str(key));
  }
}

uint64_t RunConfig::seed_value(const std::string& key, uint64_t fallback) {
  set_default(key, std::to_string(fallback));
  try {
    return std::stoull(str(key));
  } catch (const std::exception&) {
    throw Error("setting '" + key + "' is not a seed: " + str(key));
  }
}

bool RunConfig::flag(const std::string& key, bool fallback) {
  set_default(key, fallback ? "true" : "false");
  std::string v = ascii_lower(str(key));
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("setting '" + key + "' is not a boolean: " + str(key));
}

void RunConfig::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& [k, v] : values_) out << k << " = " << v << '\n';
}

namespace {

std::string ensure_out_dir(RunConfig& cfg) {
  std::string out = cfg.str("out");
  fs::create_directories(out);
  return out;
}

std::vector<std::string> parse_label_list(const std::string& s) {
  std::vector<std::string> labels;
  for (auto& l : split(s, ','))
    if (!trim(l).empty()) labels.push_back(trim(l));
  if (labels.size() < 2) throw Error("labels must list at least two base labels");
  return labels;
}

Dataset load_prepared(RunConfig& cfg) {
  std::string dir = cfg.str("data");
  std::string name = cfg.str("name", "synth");
  cfg.set_default("name", name);
  auto labels = parse_label_list(cfg.str("labels", "pos,neg"));
  cfg.set_default("labels", join(labels, ","));
  return load_corpus((fs::path(dir) / name).string(), labels,
                     cfg.seed_value("seed", 1));
}

Vocabulary load_prepared_vocab(RunConfig& cfg) {
  return load_vocab((fs::path(cfg.str("data")) / "vocab.tsv").string());
}

PolarityMap parse_polarity_map(const std::string& spec, const LabelSet& labels) {
  if (spec == "auto") return default_polarity_map(labels);
  PolarityMap map = default_polarity_map(labels);
  for (const auto& item : split(spec, ',')) {
    if (trim(item).empty()) continue;
    auto kv = split(item, '=');
    if (kv.size() != 2) throw Error("polarity entry '" + item + "' not label=POS|NEG|NONE");
    std::string pol = ascii_lower(trim(kv[1]));
    Polarity p = pol == "pos" ? Polarity::Pos
                              : pol == "neg" ? Polarity::Neg : Polarity::None;
    map[trim(kv[0])] = p;
  }
  return map;
}

std::string keywords_joined(const Explanation& e) {
  std::vector<std::string> words;
  for (const auto& k : e.keywords) words.push_back(k.token);
  return join(words, "|");
}

}  // namespace

void run_prepare(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  uint64_t seed = cfg.seed_value("seed", 1);
  int min_freq = static_cast<int>(cfg.integer("vocab_min_freq", 1));

  Dataset data;
  std::string name;
  if (cfg.has("synth_config") || !cfg.has("corpus")) {
    SynthConfig sc;
    if (cfg.has("synth_config")) {
      sc = load_synth_config(cfg.str("synth_config"));
    } else {
      sc.vocab_size = static_cast<int>(cfg.integer("vocab_size", 200));
      sc.n_pos_words = static_cast<int>(cfg.integer("n_pos_words", 20));
      sc.n_neg_words = static_cast<int>(cfg.integer("n_neg_words", 20));
      sc.len_min = static_cast<int>(cfg.integer("len_min", 6));
      sc.len_max = static_cast<int>(cfg.integer("len_max", 14));
      sc.count = static_cast<int>(cfg.integer("count", 2000));
    }
    name = cfg.str("name", "synth");
    cfg.set_default("name", name);
    cfg.set("mode", "synth");

    SynthResult synth = synth_corpus(sc, seed);
    data = std::move(synth.dataset);
    write_corpus(data, (fs::path(out) / name).string());

    // planted lexicon so DA-EK and the coherence metric line up with the
    // generator
    std::vector<std::tuple<std::string, double, double>> rows;
    for (const auto& w : synth.pos_words) rows.emplace_back(w, 0.8, 0.0);
    for (const auto& w : synth.neg_words) rows.emplace_back(w, 0.0, 0.8);
    std::sort(rows.begin(), rows.end());
    std::ofstream lex((fs::path(out) / "lexicon.tsv").string(), std::ios::binary);
    write_simple_lexicon(lex, rows);

    // synthetic "pretrained" embeddings: planted words share a cluster (so
    // embedding neighbors of a sentiment word are other sentiment words of
    // either polarity, like distributional antonyms), fillers are spread out
    int emb_dim = static_cast<int>(cfg.integer("emb_dim", 16));
    Rng erng(mix_seed(seed, "synth-embeddings"));
    Eigen::VectorXd center(emb_dim);
    for (int j = 0; j < emb_dim; ++j) center[j] = erng.next_real(-0.25, 0.25);
    std::set<std::string> planted(synth.pos_words.begin(), synth.pos_words.end());
    planted.insert(synth.neg_words.begin(), synth.neg_words.end());
    Vocabulary vocab = build_vocab(data, min_freq);
    std::vector<std::string> emb_words;
    Eigen::MatrixXd emb_rows(static_cast<Eigen::Index>(vocab.size()) - 2, emb_dim);
    for (size_t i = 2; i < vocab.words.size(); ++i) {
      const std::string& w = vocab.words[i];
      Eigen::VectorXd v(emb_dim);
      if (planted.count(w)) {
        for (int j = 0; j < emb_dim; ++j) v[j] = center[j] + erng.next_real(-0.08, 0.08);
      } else {
        for (int j = 0; j < emb_dim; ++j) v[j] = erng.next_real(-0.25, 0.25);
      }
      emb_rows.row(static_cast<Eigen::Index>(emb_words.size())) = v.transpose();
      emb_words.push_back(w);
    }
    EmbeddingTable table(std::move(emb_words), std::move(emb_rows));
    table.save_text((fs::path(out) / "embeddings.txt").string());
    write_vocab(vocab, (fs::path(out) / "vocab.tsv").string());
  } else {
    name = cfg.str("name", fs::path(cfg.str("corpus")).filename().string());
    cfg.set_default("name", name);
    cfg.set("mode", "corpus");
    auto labels = parse_label_list(cfg.str("labels", "pos,neg"));
    cfg.set_default("labels", join(labels, ","));
    data = load_corpus(cfg.str("corpus"), labels, seed);
    write_corpus(data, (fs::path(out) / name).string());
    write_vocab(build_vocab(data, min_freq), (fs::path(out) / "vocab.tsv").string());
  }
  cfg.write((fs::path(out) / "config.resolved").string());
  std::cout << "prepare: " << data.train.size() << " train / " << data.dev.size() << " dev / "
            << data.test.size() << " test examples -> " << out << "\n";
}

void run_augment(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  Dataset data = load_prepared(cfg);
  std::string method = cfg.str("method");
  std::string name = cfg.str("name", "synth");

  std::vector<AugmentationRecord> records;
  if (method == "ek") {
    double tau = cfg.real("tau", 0.1);
    SentimentLexicon lexicon = load_lexicon(cfg.str("lexicon"), tau);
    for (const auto* splitp : {&data.train, &data.dev})
      for (const auto& e : *splitp)
        if (auto rec = augment_ek(e, lexicon)) records.push_back(std::move(*rec));
  } else if (method == "adv") {
    if (!cfg.has("attack_report"))
      throw Error("augment: method adv needs attack_report artifacts from a trained model");
    std::ifstream in(cfg.str("attack_report"));
    if (!in) throw Error("cannot open " + cfg.str("attack_report"));
    std::map<std::string, const Example*> by_id;
    for (const auto& e : data.train) by_id[e.id] = &e;
    for (const auto& e : data.dev) by_id[e.id] = &e;
    for (const auto& rec : read_attack_report(in)) {
      if (rec.status != AttackStatus::Success) continue;
      auto it = by_id.find(rec.id);
      if (it == by_id.end()) throw Error("augment: attack report names unknown example " + rec.id);
      if (auto a = augment_adv(*it->second, rec.substitutions)) records.push_back(std::move(*a));
    }
  } else {
    throw Error("augment: method must be ek or adv");
  }
  cfg.write((fs::path(out) / "config.resolved").string());

  std::ofstream log((fs::path(out) / "augment.log").string(), std::ios::binary);
  write_augment_log(log, records);

  ExtendCounts counts;
  Dataset extended = extend_dataset(data, records, &counts);
  write_corpus(extended, (fs::path(out) / (name + "-" + method)).string());
  std::cout << "augment " << method << ": +" << counts.train_added << " train / +"
            << counts.dev_added << " dev examples -> " << out << "\n";
}

namespace {

Dataset dataset_for_training(RunConfig& cfg) {
  Dataset data = load_prepared(cfg);
  if (cfg.has("augment_log")) {
    std::ifstream in(cfg.str("augment_log"));
    if (!in) throw Error("cannot open " + cfg.str("augment_log"));
    auto records = read_augment_log(in, data);
    data = extend_dataset(data, records);
  }
  return data;
}

ModelConfig model_config_from(RunConfig& cfg, int default_emb_dim) {
  ModelConfig mc;
  mc.arch = arch_from_string(cfg.str("arch", "cnn"));
  cfg.set_default("arch", arch_to_string(mc.arch));
  mc.emb_dim = static_cast<int>(cfg.integer("emb_dim", default_emb_dim));
  mc.filters_per_window = static_cast<int>(cfg.integer("filters", 100));
  mc.lstm_hidden = static_cast<int>(cfg.integer("hidden", 150));
  mc.windows.clear();
  for (const auto& w : split(cfg.str("windows", "3,4,5"), ','))
    mc.windows.push_back(std::stoi(w));
  cfg.set_default("windows", "3,4,5");
  return mc;
}

}  // namespace

void run_train(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  Dataset data = dataset_for_training(cfg);
  Vocabulary vocab = load_prepared_vocab(cfg);

  TrainConfig tc;
  tc.learning_rate = cfg.real("lr", 1e-3);
  tc.batch_size = static_cast<int>(cfg.integer("batch", 32));
  tc.epochs = static_cast<int>(cfg.integer("epochs", 10));
  tc.seed = cfg.seed_value("seed", 1);
  tc.max_seq_len = static_cast<int>(cfg.integer("max_len", 400));
  tc.precision = cfg.integer("precision", 64) == 32 ? Precision::F32 : Precision::F64;
  tc.freeze_embeddings = cfg.flag("freeze_embeddings", false);
  tc.dropout = cfg.real("dropout", 0.0);

  EmbeddingTable table;
  const EmbeddingTable* init = nullptr;
  int default_dim = 300;
  if (cfg.has("embeddings")) {
    table = EmbeddingTable::load_file(cfg.str("embeddings"), vocab, mix_seed(tc.seed, "oov"));
    init = &table;
    default_dim = table.dim();
  }
  ModelConfig mc = model_config_from(cfg, default_dim);
  cfg.write((fs::path(out) / "config.resolved").string());

  auto [model, history] = train_classifier(data, mc, tc, vocab, init);
  save_checkpoint(model, (fs::path(out) / "model.ckpt").string());

  std::ofstream hist((fs::path(out) / "history.tsv").string(), std::ios::binary);
  hist << "epoch\ttrain_loss\tdev_accuracy\n";
  for (size_t i = 0; i < history.epochs.size(); ++i)
    hist << i << '\t' << fmt_real(history.epochs[i].train_loss) << '\t'
         << fmt_real(history.epochs[i].dev_accuracy) << '\n';
  hist << "# best_epoch = " << history.best_epoch << '\n';

  double test_acc = model.accuracy(data.test, true);
  std::cout << "train " << arch_to_string(mc.arch) << ": best dev epoch " << history.best_epoch
            << ", dev acc " << fmt_real(history.epochs[history.best_epoch].dev_accuracy)
            << ", test acc " << fmt_real(test_acc) << " -> " << out << "\n";
}

void run_attack(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  Dataset data = load_prepared(cfg);
  Vocabulary vocab = load_prepared_vocab(cfg);
  TextModel model = load_checkpoint(cfg.str("checkpoint"), vocab);

  AttackConfig ac;
  ac.max_generations = static_cast<int>(cfg.integer("generations", 20));
  ac.population_size = static_cast<int>(cfg.integer("population", 20));
  ac.neighbors = static_cast<int>(cfg.integer("neighbors", 8));
  ac.kept_candidates = static_cast<int>(cfg.integer("kept", 4));
  ac.change_budget = cfg.real("budget", 0.20);
  uint64_t seed = cfg.seed_value("seed", 1);
  int jobs = static_cast<int>(cfg.integer("jobs", 1));
  int limit = static_cast<int>(cfg.integer("limit", 0));

  EmbeddingTable table;
  if (cfg.has("embeddings")) {
    table = EmbeddingTable::load_file(cfg.str("embeddings"), vocab, mix_seed(seed, "oov"));
  } else {
    // fall back to the checkpoint's trained embedding rows
    std::vector<std::string> words;
    const auto& embed = model.params().embed;
    Eigen::MatrixXd rows(embed.rows() - 2, embed.cols());
    for (size_t i = 2; i < vocab.words.size(); ++i) {
      rows.row(static_cast<Eigen::Index>(i - 2)) = embed.row(static_cast<Eigen::Index>(i));
      words.push_back(vocab.words[i]);
    }
    table = EmbeddingTable(std::move(words), std::move(rows));
  }

  std::vector<const Example*> targets;
  for (const auto& split_name : split(cfg.str("splits", "train,dev"), ',')) {
    const std::vector<Example>* split_ptr = nullptr;
    if (split_name == "train") split_ptr = &data.train;
    else if (split_name == "dev") split_ptr = &data.dev;
    else if (split_name == "test") split_ptr = &data.test;
    else throw Error("attack: unknown split '" + split_name + "'");
    for (const auto& e : *split_ptr) targets.push_back(&e);
  }
  cfg.set_default("splits", "train,dev");
  if (limit > 0 && static_cast<size_t>(limit) < targets.size()) {
    Rng rng(mix_seed(seed, "attack-sample"));
    rng.shuffle(targets);
    targets.resize(limit);
    std::sort(targets.begin(), targets.end(),
              [](const Example* a, const Example* b) { return a->id < b->id; });
  }
  cfg.write((fs::path(out) / "config.resolved").string());

  BigramLm lm = ngram_lm_fit(data);
  std::vector<AttackRecord> records(targets.size());
  parallel_for(targets.size(), jobs, [&](size_t i) {
    const Example& e = *targets[i];
    AttackConfig local = ac;
    local.seed = mix_seed(seed, e.id);
    AttackResult res = genetic_attack(model, e, table, lm, local);
    AttackRecord rec;
    rec.id = e.id;
    rec.status = res.status;
    rec.generations = res.generations_used;
    if (res.final) rec.substitutions = res.final->substitutions;
    records[i] = std::move(rec);
  });

  std::ofstream report((fs::path(out) / "attack.tsv").string(), std::ios::binary);
  write_attack_report(report, records);

  size_t success = 0, skipped = 0;
  for (const auto& r : records) {
    success += r.status == AttackStatus::Success;
    skipped += r.status == AttackStatus::SkippedMisclassified;
  }
  std::cout << "attack: " << success << " successes / " << skipped << " skipped / "
            << records.size() << " attempted -> " << out << "\n";
}

void run_explain(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  Dataset data = load_prepared(cfg);
  Vocabulary vocab = load_prepared_vocab(cfg);
  TextModel model = load_checkpoint(cfg.str("checkpoint"), vocab);

  ExplainMethod method = explain_method_from_string(cfg.str("method", "lime"));
  cfg.set_default("method", explain_method_to_string(method));
  int t = static_cast<int>(cfg.integer("t", 3));
  if (t < 1) throw Error("explain: t must be >= 1");
  LimeConfig lc;
  lc.q = static_cast<int>(cfg.integer("q", 600));
  lc.sigma2 = cfg.real("sigma2", 10.0);
  lc.epochs = static_cast<int>(cfg.integer("lime_epochs", 50));
  lc.ridge = cfg.real("ridge", 1e-4);
  lc.learning_rate = cfg.real("lime_lr", 0.0);
  uint64_t seed = cfg.seed_value("seed", 1);
  int jobs = static_cast<int>(cfg.integer("jobs", 1));
  int limit = static_cast<int>(cfg.integer("limit", 0));
  std::string tag = cfg.str("tag", fs::path(cfg.str("checkpoint")).stem().string());
  cfg.set_default("tag", tag);

  std::string split_name = cfg.str("split", "test");
  cfg.set_default("split", split_name);
  const std::vector<Example>* split_ptr = nullptr;
  if (split_name == "train") split_ptr = &data.train;
  else if (split_name == "dev") split_ptr = &data.dev;
  else if (split_name == "test") split_ptr = &data.test;
  else throw Error("explain: unknown split '" + split_name + "'");

  std::string out_file = cfg.str(
      "out_file",
      (fs::path(out) / ("expl_" + tag + "_" + explain_method_to_string(method) + ".jsonl"))
          .string());
  cfg.set_default("out_file", out_file);
  cfg.write((fs::path(out) / "config.resolved").string());

  size_t n = split_ptr->size();
  if (limit > 0) n = std::min<size_t>(n, limit);
  std::vector<Explanation> explanations(n);
  parallel_for(n, jobs, [&](size_t i) {
    const Example& e = (*split_ptr)[i];
    Explanation expl;
    if (method == ExplainMethod::Lime) {
      LimeConfig local = lc;
      local.seed = mix_seed(seed, e.id);
      LimeSurrogate fit = fit_lime(model, e.tokens, local);
      std::string pred = predict_label(model, e.tokens, true);
      expl = explain_lime(fit, model.labels(), pred, t, e.tokens);
    } else {
      expl = explain_cossim(model, e.tokens, t);
    }
    expl.example_id = e.id;
    expl.model_tag = tag;
    expl.gold = e.label;
    explanations[i] = std::move(expl);
  });

  write_explanations(out_file, explanations);
  std::cout << "explain " << explain_method_to_string(method) << ": " << n << " examples ("
            << tag << ") -> " << out_file << "\n";
}

void run_evaluate(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  double tau = cfg.real("tau", 0.1);
  SentimentLexicon lexicon = load_lexicon(cfg.str("lexicon"), tau);

  std::vector<std::string> paths;
  for (const auto& p : split(cfg.str("explanations"), ','))
    if (!trim(p).empty()) paths.push_back(trim(p));
  if (paths.empty()) throw Error("evaluate: no explanation logs given");
  std::sort(paths.begin(), paths.end());
  cfg.set_default("polarity", "auto");
  cfg.write((fs::path(out) / "config.resolved").string());

  // group records by model tag and method
  std::map<std::string, std::map<std::string, std::vector<Explanation>>> grouped;
  for (const auto& path : paths)
    for (auto& e : read_explanations(path))
      grouped[e.model_tag][explain_method_to_string(e.method)].push_back(std::move(e));

  std::ofstream records_out((fs::path(out) / "coherence.jsonl").string(), std::ios::binary);
  std::ofstream summary_out((fs::path(out) / "summary.tsv").string(), std::ios::binary);
  summary_out << "model\taccuracy\tcoherence_lime\tcoherence_cossim\n";
  std::cout << "model\taccuracy\tcoherence_lime\tcoherence_cossim\n";

  for (const auto& [model_tag, by_method] : grouped) {
    double accuracy = -1;
    std::map<std::string, double> scores;
    for (const auto& [method, expls] : by_method) {
      LabelSet seen_labels;
      std::set<std::string> seen;
      for (const auto& e : expls) {
        if (seen.insert(e.prediction).second) seen_labels.base.push_back(e.prediction);
        if (seen.insert(e.gold).second) seen_labels.base.push_back(e.gold);
      }
      PolarityMap pmap = parse_polarity_map(cfg.str("polarity", "auto"), seen_labels);
      CoherenceReport report = coherence(expls, lexicon, pmap);
      scores[method] = report.score();
      size_t correct = 0;
      for (const auto& e : expls) correct += e.prediction == e.gold;
      accuracy = static_cast<double>(correct) / static_cast<double>(expls.size());
      for (const auto& rec : report.records) {
        nlohmann::json j;
        j["id"] = rec.id;
        j["model"] = rec.model;
        j["method"] = rec.method;
        j["prediction"] = rec.prediction;
        j["gold"] = rec.gold;
        j["indicated"] = polarity_to_string(rec.indicated);
        j["coherent"] = rec.coherent;
        j["positive_sum"] = rec.positive_sum;
        j["negative_sum"] = rec.negative_sum;
        records_out << j.dump() << '\n';
      }
    }
    auto cell = [&](const char* m) {
      return scores.count(m) ? fmt_real(scores[m]) : std::string("-");
    };
    std::string row = model_tag + "\t" + fmt_real(accuracy) + "\t" + cell("lime") + "\t" +
                      cell("cossim");
    summary_out << row << '\n';
    std::cout << row << '\n';
  }
}

void run_human_eval(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  std::string mode = cfg.str("mode");
  if (mode == "export") {
    Dataset data = load_prepared(cfg);
    auto expl_a = read_explanations(cfg.str("explanations_a"));
    auto expl_b = read_explanations(cfg.str("explanations_b"));
    uint64_t seed = cfg.seed_value("seed", 1);
    int count = static_cast<int>(cfg.integer("count", 100));
    cfg.write((fs::path(out) / "config.resolved").string());

    std::map<std::string, const Example*> by_id;
    for (const auto& e : data.test) by_id[e.id] = &e;
    std::map<std::string, const Explanation*> b_by_id;
    for (const auto& e : expl_b) b_by_id[e.example_id] = &e;

    std::vector<HumanEvalPair> pairs;
    for (const auto& a : expl_a) {
      auto bt = b_by_id.find(a.example_id);
      auto et = by_id.find(a.example_id);
      if (bt == b_by_id.end() || et == by_id.end()) continue;
      if (bt->second->prediction != a.prediction) continue;  // same prediction context only
      HumanEvalPair p;
      p.pair_id = a.example_id;
      p.text = detokenize(et->second->tokens);
      p.prediction = a.prediction;
      p.keywords_first = keywords_joined(a);
      p.keywords_second = keywords_joined(*bt->second);
      pairs.push_back(std::move(p));
    }
    if (static_cast<int>(pairs.size()) > count) {
      Rng rng(mix_seed(seed, "human-eval-sample"));
      rng.shuffle(pairs);
      pairs.resize(count);
      std::sort(pairs.begin(), pairs.end(),
                [](const auto& a, const auto& b) { return a.pair_id < b.pair_id; });
    }
    HumanEvalExport exp = export_human_eval(pairs, seed);
    std::ofstream sheet((fs::path(out) / "sheet.csv").string(), std::ios::binary);
    write_sheet_csv(sheet, exp.sheet);
    std::ofstream assign((fs::path(out) / "assignment.tsv").string(), std::ios::binary);
    assign << "# first = " << cfg.str("tag_first", "model_a")
           << ", second = " << cfg.str("tag_second", "model_b") << "\n";
    write_assignment(assign, exp.first_in_slot_a);
    std::cout << "human-eval export: " << exp.sheet.rows.size() << " pairs -> " << out << "\n";
  } else if (mode == "ingest") {
    std::ifstream sheet_in(cfg.str("sheet"));
    if (!sheet_in) throw Error("cannot open " + cfg.str("sheet"));
    HumanEvalSheet sheet = read_sheet_csv(sheet_in);
    std::ifstream assign_in(cfg.str("assignment"));
    if (!assign_in) throw Error("cannot open " + cfg.str("assignment"));
    auto assignment = read_assignment(assign_in);
    cfg.write((fs::path(out) / "config.resolved").string());

    HumanEvalReport report = ingest_human_eval(sheet, assignment);
    std::string tag_first = cfg.str("tag_first", "model_a");
    std::string tag_second = cfg.str("tag_second", "model_b");
    std::ofstream rep((fs::path(out) / "human_report.tsv").string(), std::ios::binary);
    rep << "model\thuman_score\tpreference_rate\n";
    rep << tag_first << '\t' << fmt_real(report.score_first) << '\t'
        << fmt_real(report.preferred_first) << '\n';
    rep << tag_second << '\t' << fmt_real(report.score_second) << '\t'
        << fmt_real(report.preferred_second) << '\n';
    std::cout << "human-eval ingest: " << report.total << " rows, " << tag_first << " "
              << fmt_real(report.score_first) << " vs " << tag_second << " "
              << fmt_real(report.score_second) << " -> " << out << "\n";
  } else {
    throw Error("human-eval: mode must be export or ingest");
  }
}

void run_reproduce(RunConfig cfg) {
  std::string out = ensure_out_dir(cfg);
  uint64_t seed = cfg.seed_value("seed", 1);
  std::string jobs = std::to_string(cfg.integer("jobs", 1));

  // desk-scale defaults; every knob can be overridden from the config
  std::string count = std::to_string(cfg.integer("count", 2000));
  std::string vocab_size = std::to_string(cfg.integer("vocab_size", 200));
  std::string len_min = std::to_string(cfg.integer("len_min", 6));
  std::string len_max = std::to_string(cfg.integer("len_max", 14));
  std::string emb_dim = std::to_string(cfg.integer("emb_dim", 16));
  std::string filters = std::to_string(cfg.integer("filters", 12));
  std::string hidden = std::to_string(cfg.integer("hidden", 32));
  std::string epochs = std::to_string(cfg.integer("epochs", 8));
  std::string attack_limit = std::to_string(cfg.integer("attack_limit", 1800));
  std::string explain_limit = std::to_string(cfg.integer("explain_limit", 0));
  std::string arch = cfg.str("arch", "cnn");
  cfg.set_default("arch", arch);
  std::string tau = fmt_real(cfg.real("tau", 0.1));
  std::string seed_s = std::to_string(seed);
  cfg.write((fs::path(out) / "config.resolved").string());

  auto path = [&](const char* rel) { return (fs::path(out) / rel).string(); };
  std::string data_dir = path("data");

  {
    RunConfig c;
    c.set("out", data_dir);
    c.set("seed", seed_s);
    c.set("count", count);
    c.set("vocab_size", vocab_size);
    c.set("len_min", len_min);
    c.set("len_max", len_max);
    c.set("emb_dim", emb_dim);
    run_prepare(std::move(c));
  }

  auto train_stage = [&](const char* dir, const std::string& augment_log) {
    RunConfig c;
    c.set("out", path(dir));
    c.set("data", data_dir);
    c.set("seed", seed_s);
    c.set("arch", arch);
    c.set("embeddings", (fs::path(data_dir) / "embeddings.txt").string());
    c.set("filters", filters);
    c.set("hidden", hidden);
    c.set("epochs", epochs);
    if (!augment_log.empty()) c.set("augment_log", augment_log);
    run_train(std::move(c));
  };

  train_stage("models/base", "");

  {
    RunConfig c;
    c.set("out", path("aug-ek"));
    c.set("data", data_dir);
    c.set("seed", seed_s);
    c.set("method", "ek");
    c.set("lexicon", (fs::path(data_dir) / "lexicon.tsv").string());
    c.set("tau", tau);
    run_augment(std::move(c));
  }
  train_stage("models/ek", (fs::path(path("aug-ek")) / "augment.log").string());

  {
    RunConfig c;
    c.set("out", path("attack"));
    c.set("data", data_dir);
    c.set("seed", seed_s);
    c.set("jobs", jobs);
    c.set("checkpoint", (fs::path(path("models/base")) / "model.ckpt").string());
    c.set("embeddings", (fs::path(data_dir) / "embeddings.txt").string());
    c.set("limit", attack_limit);
    run_attack(std::move(c));
  }
  {
    RunConfig c;
    c.set("out", path("aug-adv"));
    c.set("data", data_dir);
    c.set("seed", seed_s);
    c.set("method", "adv");
    c.set("attack_report", (fs::path(path("attack")) / "attack.tsv").string());
    run_augment(std::move(c));
  }
  train_stage("models/adv", (fs::path(path("aug-adv")) / "augment.log").string());

  std::vector<std::string> expl_files;
  for (const auto& [dir, tag] : std::vector<std::pair<std::string, std::string>>{
           {"models/base", arch + "-base"}, {"models/ek", arch + "-ek"},
           {"models/adv", arch + "-adv"}}) {
    for (const char* method : {"lime", "cossim"}) {
      RunConfig c;
      c.set("out", (fs::path(path("expl")) / (tag + "-" + method)).string());
      c.set("data", data_dir);
      c.set("seed", seed_s);
      c.set("jobs", jobs);
      c.set("checkpoint", (fs::path(path(dir.c_str())) / "model.ckpt").string());
      c.set("method", method);
      c.set("tag", tag);
      c.set("limit", explain_limit);
      c.set("out_file",
            (fs::path(path("expl")) / ("expl_" + tag + "_" + method + ".jsonl")).string());
      expl_files.push_back(c.str("out_file"));
      run_explain(std::move(c));
    }
  }

  {
    RunConfig c;
    c.set("out", path("eval"));
    c.set("lexicon", (fs::path(data_dir) / "lexicon.tsv").string());
    c.set("tau", tau);
    c.set("explanations", join(expl_files, ","));
    run_evaluate(std::move(c));
  }
  std::cout << "reproduce: summary written to " << (fs::path(path("eval")) / "summary.tsv")
            << "\n";
}

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {"prepare",
       "Build a dataset directory (synthetic corpus or existing TSVs)",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"synth_config", "synthetic corpus key=value file"},
        {"corpus", "prefix of existing <prefix>.{train,dev,test}.tsv files"},
        {"labels", "comma-separated base labels"},
        {"name", "corpus name inside the output directory"},
        {"count", "synthetic example count"},
        {"vocab_size", "synthetic vocabulary size"},
        {"n_pos_words", "planted positive words"},
        {"n_neg_words", "planted negative words"},
        {"len_min", "minimum sentence length"},
        {"len_max", "maximum sentence length"},
        {"emb_dim", "synthetic embedding dimension"},
        {"vocab_min_freq", "minimum train frequency for vocab entries"}}},
      {"augment",
       "Create augmented examples (DA-EK from a lexicon, DA-Adv from attacks)",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"data", "prepared dataset directory"},
        {"name", "corpus name"},
        {"labels", "comma-separated base labels"},
        {"method", "ek or adv"},
        {"lexicon", "sentiment lexicon path (ek)"},
        {"tau", "sentiment-word membership threshold"},
        {"attack_report", "attack.tsv path (adv)"}}},
      {"train",
       "Train a CNN or LSTM sentiment classifier",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"data", "prepared dataset directory"},
        {"name", "corpus name"},
        {"labels", "comma-separated base labels"},
        {"augment_log", "augment.log to extend the dataset with"},
        {"arch", "cnn or rnn"},
        {"embeddings", "pretrained embedding file"},
        {"emb_dim", "embedding dimension"},
        {"windows", "CNN window sizes"},
        {"filters", "CNN filters per window"},
        {"hidden", "LSTM hidden size"},
        {"lr", "Adam learning rate"},
        {"batch", "batch size"},
        {"epochs", "epoch count"},
        {"max_len", "training-time truncation length"},
        {"precision", "64 or 32"},
        {"freeze_embeddings", "do not fine-tune embeddings"},
        {"dropout", "representation dropout probability"}}},
      {"attack",
       "Genetic synonym-substitution attack against a trained model",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"jobs", "worker threads"},
        {"data", "prepared dataset directory"},
        {"name", "corpus name"},
        {"labels", "comma-separated base labels"},
        {"checkpoint", "victim model checkpoint"},
        {"embeddings", "embedding table for neighbor lookup"},
        {"splits", "comma-separated splits to attack"},
        {"limit", "max examples to attack (0 = all)"},
        {"generations", "max generations"},
        {"population", "population size"},
        {"neighbors", "embedding neighbors per position"},
        {"kept", "candidates kept after LM filtering"},
        {"budget", "max fraction of substituted words"}}},
      {"explain",
       "Generate LIME or cosine-similarity explanations",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"jobs", "worker threads"},
        {"data", "prepared dataset directory"},
        {"name", "corpus name"},
        {"labels", "comma-separated base labels"},
        {"checkpoint", "model checkpoint"},
        {"split", "train, dev or test"},
        {"method", "lime or cossim"},
        {"t", "keywords per explanation"},
        {"q", "LIME perturbation samples"},
        {"sigma2", "LIME proximity kernel width"},
        {"lime_epochs", "LIME surrogate epochs"},
        {"lime_lr", "LIME step size (0 = automatic)"},
        {"ridge", "LIME ridge strength"},
        {"limit", "max examples (0 = all)"},
        {"tag", "model tag recorded in the log"},
        {"out_file", "explanation log path"}}},
      {"evaluate",
       "Coherence scores and the summary table from explanation logs",
       {{"out", "output directory"},
        {"lexicon", "sentiment lexicon path"},
        {"tau", "sentiment-word membership threshold"},
        {"explanations", "comma-separated explanation logs"},
        {"polarity", "label=POS|NEG|NONE overrides (auto)"}}},
      {"human-eval",
       "Export blinded evaluation sheets / ingest filled responses",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"mode", "export or ingest"},
        {"data", "prepared dataset directory (export)"},
        {"name", "corpus name"},
        {"labels", "comma-separated base labels"},
        {"explanations_a", "first model's explanation log (export)"},
        {"explanations_b", "second model's explanation log (export)"},
        {"count", "pairs to sample (export)"},
        {"sheet", "filled sheet.csv (ingest)"},
        {"assignment", "assignment.tsv (ingest)"},
        {"tag_first", "display tag of the first model"},
        {"tag_second", "display tag of the second model"}}},
      {"reproduce",
       "Full pipeline: prepare, train base/ek/adv, attack, explain, evaluate",
       {{"out", "output directory"},
        {"seed", "global seed"},
        {"jobs", "worker threads"},
        {"arch", "cnn or rnn"},
        {"count", "synthetic example count"},
        {"vocab_size", "synthetic vocabulary size"},
        {"len_min", "minimum sentence length"},
        {"len_max", "maximum sentence length"},
        {"emb_dim", "embedding dimension"},
        {"filters", "CNN filters per window"},
        {"hidden", "LSTM hidden size"},
        {"epochs", "training epochs"},
        {"tau", "sentiment-word membership threshold"},
        {"attack_limit", "examples attacked for DA-Adv"},
        {"explain_limit", "test examples explained (0 = all)"}}},
  };
  return specs;
}

void run_command(const std::string& name, RunConfig cfg) {
  if (name == "prepare") return run_prepare(std::move(cfg));
  if (name == "augment") return run_augment(std::move(cfg));
  if (name == "train") return run_train(std::move(cfg));
  if (name == "attack") return run_attack(std::move(cfg));
  if (name == "explain") return run_explain(std::move(cfg));
  if (name == "evaluate") return run_evaluate(std::move(cfg));
  if (name == "human-eval") return run_human_eval(std::move(cfg));
  if (name == "reproduce") return run_reproduce(std::move(cfg));
  throw Error("unknown command '" + name + "'");
}

}  // namespace sentaug
