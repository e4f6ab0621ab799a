#include "sentaug/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sentaug/rng.hpp"

namespace sentaug {

namespace {

bool is_word_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return in;
}

}  // namespace

Token make_token(std::string surface) {
  if (surface.empty()) throw Error("empty token");
  Token t;
  t.norm = ascii_lower(surface);
  t.surface = std::move(surface);
  return t;
}

bool operator==(const Token& a, const Token& b) {
  return a.surface == b.surface && a.norm == b.norm;
}

bool is_punct_token(const Token& t) {
  for (unsigned char c : t.norm)
    if (is_word_char(c)) return false;
  return !t.norm.empty();
}

std::vector<Token> tokenize(const std::string& text) {
  if (trim(text).empty()) throw Error("tokenize: empty input");
  std::vector<Token> out;
  const size_t n = text.size();
  size_t i = 0;
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      ++i;
      continue;
    }
    if (is_word_char(c)) {
      size_t j = i + 1;
      while (j < n && is_word_char(static_cast<unsigned char>(text[j]))) ++j;
      out.push_back(make_token(text.substr(i, j - i)));
      // apostrophe glued to a word and followed by letters forms a clitic
      // token that keeps the apostrophe: "piccoli's" -> "piccoli", "'s"
      if (j + 1 < n && text[j] == '\'' && is_word_char(static_cast<unsigned char>(text[j + 1]))) {
        size_t k = j + 1;
        while (k < n && is_word_char(static_cast<unsigned char>(text[k]))) ++k;
        out.push_back(make_token(text.substr(j, k - j)));
        i = k;
        continue;
      }
      i = j;
      continue;
    }
    out.push_back(make_token(std::string(1, static_cast<char>(c))));
    ++i;
  }
  return out;
}

std::string detokenize(const std::vector<Token>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

std::vector<std::string> LabelSet::all() const {
  std::vector<std::string> out = base;
  if (aug) out.push_back(*aug);
  return out;
}

int LabelSet::index_of(const std::string& label) const {
  for (size_t i = 0; i < base.size(); ++i)
    if (base[i] == label) return static_cast<int>(i);
  if (aug && *aug == label) return static_cast<int>(base.size());
  return -1;
}

void LabelSet::validate() const {
  if (base.size() < 2) throw Error("label set needs >= 2 base labels");
  std::set<std::string> seen(base.begin(), base.end());
  if (seen.size() != base.size()) throw Error("duplicate base label");
  if (aug && seen.count(*aug)) throw Error("AUG label collides with base label");
}

void Dataset::validate() const {
  labels.validate();
  auto check = [&](const Example& e, bool is_test) {
    if (e.tokens.empty()) throw Error("example " + e.id + ": no tokens");
    if (labels.index_of(e.label) < 0)
      throw Error("example " + e.id + ": label '" + e.label + "' not in label set");
    bool original = e.origin == Origin::Original;
    if (original != !e.source_id.has_value())
      throw Error("example " + e.id + ": origin/source_id mismatch");
    if (is_test && !original) throw Error("test example " + e.id + " is augmented");
  };
  for (const auto& e : train) check(e, false);
  for (const auto& e : dev) check(e, false);
  for (const auto& e : test) check(e, true);
}

namespace {

std::vector<Example> load_split_file(const std::string& path, const std::string& split_name,
                                     const std::vector<std::string>& base_labels, bool* found) {
  std::vector<Example> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (found) {
      *found = false;
      return out;
    }
    throw Error("cannot open " + path);
  }
  if (found) *found = true;
  std::set<std::string> labels(base_labels.begin(), base_labels.end());
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": missing TAB separator");
    std::string label = line.substr(0, tab);
    if (!labels.count(label))
      throw Error(path + ":" + std::to_string(line_no) + ": unknown label '" + label + "'");
    Example e;
    e.id = split_name + "-" + std::to_string(out.size());
    try {
      e.tokens = tokenize(line.substr(tab + 1));
    } catch (const Error& err) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + err.what());
    }
    e.label = std::move(label);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace

Dataset load_corpus(const std::string& prefix, const std::vector<std::string>& base_labels,
                    uint64_t dev_split_seed) {
  Dataset data;
  data.labels.base = base_labels;
  data.train = load_split_file(prefix + ".train.tsv", "train", base_labels, nullptr);
  bool have_dev = false;
  data.dev = load_split_file(prefix + ".dev.tsv", "dev", base_labels, &have_dev);
  data.test = load_split_file(prefix + ".test.tsv", "test", base_labels, nullptr);
  if (!have_dev) {
    // no published dev split: carve a seeded 10% out of train
    std::vector<size_t> idx(data.train.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(mix_seed(dev_split_seed, "dev-split"));
    rng.shuffle(idx);
    size_t n_dev = data.train.size() / 10;
    std::set<size_t> dev_set(idx.begin(), idx.begin() + n_dev);
    std::vector<Example> train2, dev2;
    for (size_t i = 0; i < data.train.size(); ++i)
      (dev_set.count(i) ? dev2 : train2).push_back(std::move(data.train[i]));
    for (size_t i = 0; i < dev2.size(); ++i) dev2[i].id = "dev-" + std::to_string(i);
    for (size_t i = 0; i < train2.size(); ++i) train2[i].id = "train-" + std::to_string(i);
    data.train = std::move(train2);
    data.dev = std::move(dev2);
  }
  data.validate();
  return data;
}

void write_corpus(const Dataset& data, const std::string& prefix) {
  auto write_split = [&](const std::vector<Example>& split, const std::string& name) {
    std::ofstream out(prefix + "." + name + ".tsv", std::ios::binary);
    if (!out) throw Error("cannot write " + prefix + "." + name + ".tsv");
    for (const auto& e : split) out << e.label << '\t' << detokenize(e.tokens) << '\n';
  };
  write_split(data.train, "train");
  write_split(data.dev, "dev");
  write_split(data.test, "test");
}

void SynthConfig::validate() const {
  if (count < 0) throw Error("synth: count must be >= 0");
  if (len_min < 1 || len_max < len_min) throw Error("synth: bad sentence length range");
  if (n_pos_words < 1 || n_neg_words < 1) throw Error("synth: need planted words on both sides");
  if (n_pos_words + n_neg_words >= vocab_size)
    throw Error("synth: vocab_size leaves no filler words");
  if (!pos_words.empty() && static_cast<int>(pos_words.size()) != n_pos_words)
    throw Error("synth: pos_words size disagrees with n_pos_words");
  if (!neg_words.empty() && static_cast<int>(neg_words.size()) != n_neg_words)
    throw Error("synth: neg_words size disagrees with n_neg_words");
  std::set<std::string> pos(pos_words.begin(), pos_words.end());
  for (const auto& w : neg_words)
    if (pos.count(w)) throw Error("synth: word '" + w + "' in both planted lists");
}

SynthConfig load_synth_config(const std::string& path) {
  SynthConfig cfg;
  std::ifstream in = open_or_throw(path);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(path + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    try {
      if (key == "vocab_size") cfg.vocab_size = std::stoi(value);
      else if (key == "n_pos_words") cfg.n_pos_words = std::stoi(value);
      else if (key == "n_neg_words") cfg.n_neg_words = std::stoi(value);
      else if (key == "len_min") cfg.len_min = std::stoi(value);
      else if (key == "len_max") cfg.len_max = std::stoi(value);
      else if (key == "count") cfg.count = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else throw Error(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw Error(path + ":" + std::to_string(line_no) + ": bad value for " + key);
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

// Pronounceable pseudo-words, unique, deterministic in rng draw order.
std::vector<std::string> make_words(Rng& rng, int count, std::set<std::string>& taken) {
  static const char* kConsonants = "bdfgklmnprstvz";
  static const char* kVowels = "aeiou";
  std::vector<std::string> out;
  while (static_cast<int>(out.size()) < count) {
    std::string w;
    int syllables = rng.next_int(2, 3);
    for (int s = 0; s < syllables; ++s) {
      w += kConsonants[rng.next_below(14)];
      w += kVowels[rng.next_below(5)];
    }
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

constexpr double kFillerSkew = 0.4;  // share of filler draws from the label pool

}  // namespace

SynthResult synth_corpus(const SynthConfig& config, uint64_t seed) {
  config.validate();
  SynthResult res;
  Rng rng(mix_seed(seed, "synth-corpus"));

  std::set<std::string> taken;
  res.pos_words = config.pos_words;
  res.neg_words = config.neg_words;
  taken.insert(res.pos_words.begin(), res.pos_words.end());
  taken.insert(res.neg_words.begin(), res.neg_words.end());
  if (res.pos_words.empty()) res.pos_words = make_words(rng, config.n_pos_words, taken);
  if (res.neg_words.empty()) res.neg_words = make_words(rng, config.n_neg_words, taken);
  int n_filler = config.vocab_size - config.n_pos_words - config.n_neg_words;
  res.filler_words = make_words(rng, n_filler, taken);

  // Label-conditioned filler pools: the first quarter of the fillers leans
  // positive sentences, the second quarter negative. This gives the base
  // model spurious non-lexicon correlations to latch onto.
  int pool = std::max(1, n_filler / 5);
  auto draw_filler = [&](int label_idx) -> const std::string& {
    if (n_filler >= 2 * pool && rng.next_real() < kFillerSkew) {
      int off = label_idx == 0 ? 0 : pool;
      return res.filler_words[off + static_cast<int>(rng.next_below(pool))];
    }
    return res.filler_words[rng.next_below(n_filler)];
  };

  std::vector<Example> all;
  all.reserve(config.count);
  for (int i = 0; i < config.count; ++i) {
    int label_idx = i % 2;  // balanced schedule: alternate pos/neg
    const auto& planted = label_idx == 0 ? res.pos_words : res.neg_words;
    int len = rng.next_int(config.len_min, config.len_max);
    int n_senti = rng.next_int(1, std::min(2, len));

    std::set<int> senti_pos;
    while (static_cast<int>(senti_pos.size()) < n_senti)
      senti_pos.insert(static_cast<int>(rng.next_below(len)));
    std::set<size_t> senti_words;
    while (static_cast<int>(senti_words.size()) < n_senti)
      senti_words.insert(rng.next_below(planted.size()));

    Example e;
    e.label = label_idx == 0 ? kPosLabel : kNegLabel;
    auto word_it = senti_words.begin();
    for (int p = 0; p < len; ++p) {
      if (senti_pos.count(p))
        e.tokens.push_back(make_token(planted[*word_it++]));
      else
        e.tokens.push_back(make_token(draw_filler(label_idx)));
    }
    all.push_back(std::move(e));
  }

  int n_test = config.count / 10;
  int n_dev = config.count / 10;
  int n_train = config.count - n_dev - n_test;
  auto take = [&](int from, int n, const char* name, std::vector<Example>& dst) {
    for (int i = 0; i < n; ++i) {
      all[from + i].id = std::string(name) + "-" + std::to_string(i);
      dst.push_back(std::move(all[from + i]));
    }
  };
  take(0, n_train, "train", res.dataset.train);
  take(n_train, n_dev, "dev", res.dataset.dev);
  take(n_train + n_dev, n_test, "test", res.dataset.test);
  res.dataset.labels.base = {kPosLabel, kNegLabel};
  res.dataset.validate();
  return res;
}

int Vocabulary::id(const std::string& norm) const {
  auto it = index.find(norm);
  return it == index.end() ? kUnk : it->second;
}

uint64_t Vocabulary::hash() const {
  uint64_t h = 14695981039346656037ull;
  for (const auto& w : words) {
    h = fnv1a(w, h);
    h = fnv1a("\n", h);
  }
  return h;
}

Vocabulary build_vocab(const Dataset& data, int min_freq) {
  if (data.train.empty()) throw Error("build_vocab: empty train split");
  std::map<std::string, int64_t> freq;
  for (const auto& e : data.train)
    for (const auto& t : e.tokens) ++freq[t.norm];

  std::vector<std::pair<std::string, int64_t>> kept;
  for (const auto& [w, f] : freq)
    if (f >= min_freq) kept.emplace_back(w, f);
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });

  Vocabulary v;
  v.words = {"<pad>", "<unk>"};
  v.freqs = {0, 0};
  for (auto& [w, f] : kept) {
    v.index[w] = static_cast<int>(v.words.size());
    v.words.push_back(w);
    v.freqs.push_back(f);
  }
  return v;
}

void write_vocab(const Vocabulary& vocab, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (size_t i = 0; i < vocab.words.size(); ++i)
    out << vocab.words[i] << '\t' << vocab.freqs[i] << '\n';
}

Vocabulary load_vocab(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  Vocabulary v;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() != 2)
      throw Error(path + ":" + std::to_string(line_no) + ": expected word<TAB>freq");
    v.words.push_back(parts[0]);
    v.freqs.push_back(std::stoll(parts[1]));
  }
  if (v.words.size() < 2 || v.words[0] != "<pad>" || v.words[1] != "<unk>")
    throw Error(path + ": vocab must start with <pad>, <unk>");
  for (size_t i = 2; i < v.words.size(); ++i) v.index[v.words[i]] = static_cast<int>(i);
  return v;
}

}  // namespace sentaug
