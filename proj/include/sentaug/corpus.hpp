#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentaug/util.hpp"

namespace sentaug {

struct Token {
  std::string surface;
  std::string norm;  // case-folded surface
};

Token make_token(std::string surface);
bool operator==(const Token& a, const Token& b);

// True for tokens made of punctuation characters only (",", "!", ...).
bool is_punct_token(const Token& t);

enum class Origin { Original, AugEk, AugAdv };

struct Example {
  std::string id;
  std::vector<Token> tokens;
  std::string label;
  Origin origin = Origin::Original;
  std::optional<std::string> source_id;  // set iff origin != Original
};

struct LabelSet {
  std::vector<std::string> base;
  std::optional<std::string> aug;

  bool has_aug() const { return aug.has_value(); }
  size_t size() const { return base.size() + (has_aug() ? 1 : 0); }
  // All labels in head order: base labels first, AUG last.
  std::vector<std::string> all() const;
  // Index into all(), or -1 if unknown.
  int index_of(const std::string& label) const;
  int aug_index() const { return has_aug() ? static_cast<int>(base.size()) : -1; }
  void validate() const;
};

struct Dataset {
  std::vector<Example> train, dev, test;
  LabelSet labels;

  void validate() const;  // label membership, test-split purity, example invariants
};

// Lowercasing whitespace/punctuation tokenizer with clitic separation
// ("piccoli's" -> "piccoli", "'s"). Throws on input that is empty after trim.
std::vector<Token> tokenize(const std::string& text);
std::string detokenize(const std::vector<Token>& tokens);

// Reads <prefix>.train.tsv / .dev.tsv / .test.tsv (lines "label<TAB>text",
// '#' lines ignored). A missing dev file is replaced by a seeded 90/10 split
// of train. Unknown labels and malformed lines are reported with line numbers.
Dataset load_corpus(const std::string& prefix, const std::vector<std::string>& base_labels,
                    uint64_t dev_split_seed = 1);
void write_corpus(const Dataset& data, const std::string& prefix);

struct SynthConfig {
  int vocab_size = 200;
  int n_pos_words = 20;
  int n_neg_words = 20;
  int len_min = 6;
  int len_max = 14;
  int count = 2000;
  uint64_t seed = 1;
  // Optional explicit planted lists; generated from the seed when empty.
  std::vector<std::string> pos_words, neg_words;

  void validate() const;
};

// Plain-text "key = value" file with keys
// vocab_size, n_pos_words, n_neg_words, len_min, len_max, count, seed.
SynthConfig load_synth_config(const std::string& path);

struct SynthResult {
  Dataset dataset;
  std::vector<std::string> pos_words, neg_words, filler_words;
};

inline constexpr const char* kPosLabel = "pos";
inline constexpr const char* kNegLabel = "neg";
inline constexpr const char* kAugLabel = "AUG";

// Deterministic desk-scale corpus: neutral filler words plus 1-2 planted
// sentiment words per sentence, balanced labels, 80/10/10 splits. A mild
// label-conditioned skew of the filler distribution plants the spurious
// correlations that augmented training is supposed to remove.
SynthResult synth_corpus(const SynthConfig& config, uint64_t seed);

struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  std::vector<std::string> words;  // index -> word; [0]=<pad>, [1]=<unk>
  std::vector<int64_t> freqs;      // train frequency (0 for specials)
  std::unordered_map<std::string, int> index;

  size_t size() const { return words.size(); }
  bool contains(const std::string& norm) const { return index.count(norm) > 0; }
  int id(const std::string& norm) const;  // kUnk for unknown words
  uint64_t hash() const;                  // stable fingerprint of the word list
};

// Indexes every train token with frequency >= min_freq; ordering is
// (frequency desc, word asc) so indices are stable for identical input.
Vocabulary build_vocab(const Dataset& data, int min_freq);

void write_vocab(const Vocabulary& vocab, const std::string& path);
Vocabulary load_vocab(const std::string& path);

}  // namespace sentaug
