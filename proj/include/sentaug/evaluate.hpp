#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sentaug/explain.hpp"
#include "sentaug/lexicon.hpp"

namespace sentaug {

enum class Polarity { Pos, Neg, None };

std::string polarity_to_string(Polarity p);

// Label -> polarity table; identity for the 2-class pos/neg datasets.
using PolarityMap = std::map<std::string, Polarity>;

PolarityMap default_polarity_map(const LabelSet& labels);

Polarity label_polarity(const std::string& label, const PolarityMap& map);

struct PolaritySummary {
  double positive_sum = 0;
  double negative_sum = 0;
  Polarity indicated = Polarity::None;  // None iff the sums tie (both 0 included)
};

// Accumulates lexicon scores over the explanation keywords; absent words
// contribute nothing.
PolaritySummary score_explanation(const Explanation& explanation,
                                  const SentimentLexicon& lexicon);

// Condition 1: indicated polarity exists and matches the prediction.
// Condition 2: no indicated polarity and the prediction is wrong.
bool is_coherent(Polarity indicated, Polarity prediction, Polarity gold);

struct CoherenceRecord {
  std::string id, model, method, prediction, gold;
  Polarity indicated = Polarity::None;
  bool coherent = false;
  double positive_sum = 0, negative_sum = 0;
};

struct CoherenceReport {
  std::vector<CoherenceRecord> records;
  size_t coherent_count = 0;
  size_t total = 0;

  double score() const {
    return total == 0 ? 0.0 : static_cast<double>(coherent_count) / static_cast<double>(total);
  }
};

// Aligned-list form; throws on length mismatch.
CoherenceReport coherence(const std::vector<Explanation>& explanations,
                          const std::vector<std::string>& predictions,
                          const std::vector<std::string>& golds, const SentimentLexicon& lexicon,
                          const PolarityMap& polarity_map);

// Convenience form using the predictions/golds embedded in the explanations.
CoherenceReport coherence(const std::vector<Explanation>& explanations,
                          const SentimentLexicon& lexicon, const PolarityMap& polarity_map);

// --- human evaluation tooling -------------------------------------------

struct HumanEvalRow {
  std::string pair_id, text, prediction;
  std::string keywords_a, keywords_b;  // '|'-joined keyword tokens
  int score_a = -1, score_b = -1;      // 0/1 on ingest
  char preferred = 0;                  // 'A' or 'B' on ingest
};

struct HumanEvalSheet {
  std::vector<HumanEvalRow> rows;
};

struct HumanEvalPair {
  std::string pair_id, text, prediction;
  std::string keywords_first, keywords_second;  // model identities kept by caller
};

struct HumanEvalExport {
  HumanEvalSheet sheet;
  std::map<std::string, bool> first_in_slot_a;  // pair_id -> blinding assignment
};

// Seeded fair coin assigns the two models to slots A/B per pair; the sheet
// itself carries no model identity.
HumanEvalExport export_human_eval(const std::vector<HumanEvalPair>& pairs, uint64_t seed);

struct HumanEvalReport {
  double score_first = 0, score_second = 0;        // mean of the 0/1 marks
  double preferred_first = 0, preferred_second = 0;  // preference rates
  size_t total = 0;
};

// Unblinds with the stored assignment; invalid responses report the row.
HumanEvalReport ingest_human_eval(const HumanEvalSheet& sheet,
                                  const std::map<std::string, bool>& first_in_slot_a);

// CSV with header pair_id,text,prediction,keywords_A,keywords_B,score_A,score_B,preferred.
void write_sheet_csv(std::ostream& out, const HumanEvalSheet& sheet);
HumanEvalSheet read_sheet_csv(std::istream& in);

void write_assignment(std::ostream& out, const std::map<std::string, bool>& first_in_slot_a);
std::map<std::string, bool> read_assignment(std::istream& in);

}  // namespace sentaug
