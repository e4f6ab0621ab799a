#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentaug/corpus.hpp"

namespace sentaug {

struct RawSynsetEntry {
  char pos_tag = 'a';  // one of a/n/v/r
  long synset_id = 0;
  double pos_score = 0;
  double neg_score = 0;
  std::vector<std::pair<std::string, int>> terms;  // (lemma, sense rank)
};

// SentiWordNet 3.0 lines: POS<TAB>ID<TAB>PosScore<TAB>NegScore<TAB>Terms<TAB>Gloss,
// terms space-separated "lemma#rank", '#' comment lines skipped.
std::vector<RawSynsetEntry> parse_sentiwordnet(std::istream& in);

// Simplified 3-column format for synthetic lexicons: lemma<TAB>pos<TAB>neg.
std::vector<RawSynsetEntry> parse_simple_lexicon(std::istream& in);
void write_simple_lexicon(std::ostream& out,
                          const std::vector<std::tuple<std::string, double, double>>& rows);

struct SentimentScore {
  double positive = 0;
  double negative = 0;
  double neutral = 1;
};

enum class AggregatePolicy { MeanAllSenses };

class SentimentLexicon {
 public:
  SentimentLexicon() = default;
  SentimentLexicon(std::unordered_map<std::string, SentimentScore> scores, double tau)
      : scores_(std::move(scores)), tau_(tau) {}

  double membership_threshold() const { return tau_; }
  void set_membership_threshold(double tau) { tau_ = tau; }
  size_t size() const { return scores_.size(); }

  std::optional<SentimentScore> lookup(const std::string& norm) const;
  std::optional<SentimentScore> lookup(const Token& word) const { return lookup(word.norm); }

  // True iff the word is present and max(positive, negative) >= tau.
  bool is_sentiment_word(const Token& word) const;

 private:
  std::unordered_map<std::string, SentimentScore> scores_;
  double tau_ = 0.1;
};

// Per lemma: unweighted mean of pos/neg over every synset containing it
// (POS-agnostic), neutral = 1 - positive - negative.
SentimentLexicon aggregate(const std::vector<RawSynsetEntry>& entries, AggregatePolicy policy,
                           double tau = 0.1);

// Auto-detects full SentiWordNet vs the simplified 3-column format.
SentimentLexicon load_lexicon(const std::string& path, double tau = 0.1);

}  // namespace sentaug
