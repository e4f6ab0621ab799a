#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sentaug/augment.hpp"
#include "sentaug/classifier.hpp"
#include "sentaug/corpus.hpp"
#include "sentaug/embeddings.hpp"
#include "sentaug/rng.hpp"

namespace sentaug {

// Language-model interface for filtering substitution candidates by how well
// they fit a +-1 token context. Implementations must be deterministic.
class LmScorer {
 public:
  virtual ~LmScorer() = default;
  // Log-likelihood of `word` between left.back() and right.front() (either
  // side may be empty at sentence edges).
  virtual double score(const std::vector<std::string>& left, const std::string& word,
                       const std::vector<std::string>& right) const = 0;
};

// Add-one smoothed bigram model; desk-scale stand-in for a large pretrained LM.
class BigramLm : public LmScorer {
 public:
  double score(const std::vector<std::string>& left, const std::string& word,
               const std::vector<std::string>& right) const override;

  double log_prob(const std::string& prev, const std::string& word) const;
  const std::set<std::string>& vocab() const { return vocab_; }

  friend BigramLm ngram_lm_fit(const Dataset& corpus);

 private:
  std::map<std::string, std::map<std::string, long>> bigrams_;  // prev -> word -> count
  std::map<std::string, long> context_totals_;
  std::set<std::string> vocab_;
};

// Fits the bigram model on the train split.
BigramLm ngram_lm_fit(const Dataset& corpus);

struct AttackConfig {
  int max_generations = 20;
  int population_size = 20;
  int neighbors = 8;        // k embedding neighbors per position
  int kept_candidates = 4;  // top candidates kept after LM filtering
  double change_budget = 0.20;
  uint64_t seed = 1;

  void validate() const;
};

struct Candidate {
  std::vector<Token> tokens;
  SubstitutionMap substitutions;
  double fitness = 0;  // model probability of the attack's target label
};

enum class AttackStatus { Success, FailedBudget, SkippedMisclassified };

std::string attack_status_to_string(AttackStatus s);
AttackStatus attack_status_from_string(const std::string& s);

struct AttackResult {
  AttackStatus status = AttackStatus::FailedBudget;
  std::optional<Candidate> final;  // set on success
  int generations_used = 0;
  std::vector<double> best_fitness_history;  // best population fitness per generation
};

// One mutation step: sample an eligible position, take k embedding neighbors
// of the original word there, keep the kept_candidates best under the LM, and
// adopt the substitution that most raises the target probability (unchanged
// when none improves).
Candidate perturb(const Candidate& candidate, const Example& original, const Classifier& model,
                  const EmbeddingTable& table, const LmScorer& lm, const AttackConfig& config,
                  int target_base_index, Rng& rng);

// Genetic attack following the synonym-substitution scheme: fitness-ranked
// population, size-1 elitism, fitness-proportional parents, single-point
// crossover over substitution maps, then perturb.
AttackResult genetic_attack(const Classifier& model, const Example& example,
                            const EmbeddingTable& table, const LmScorer& lm,
                            const AttackConfig& config);

struct AttackRecord {
  std::string id;
  AttackStatus status = AttackStatus::FailedBudget;
  int generations = 0;
  SubstitutionMap substitutions;
};

// Report line: id<TAB>status<TAB>generations<TAB>pos:old>new,... records.
void write_attack_report(std::ostream& out, const std::vector<AttackRecord>& records);
std::vector<AttackRecord> read_attack_report(std::istream& in);

}  // namespace sentaug
