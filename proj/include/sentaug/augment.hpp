#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sentaug/corpus.hpp"
#include "sentaug/lexicon.hpp"

namespace sentaug {

enum class AugmentMethod { Ek, Adv };

std::string augment_method_to_string(AugmentMethod m);
AugmentMethod augment_method_from_string(const std::string& s);

// old/new word pair keyed by position in the original token sequence.
using SubstitutionMap = std::map<int, std::pair<std::string, std::string>>;

struct AugmentationRecord {
  std::string source_id;
  std::vector<int> removed_positions;  // strictly increasing
  AugmentMethod method = AugmentMethod::Ek;
  Example result;  // origin AugEk/AugAdv, label AUG
};

// Removes every non-punctuation token the lexicon marks as a sentiment word.
// Returns nothing when no token is removed or no token would remain.
std::optional<AugmentationRecord> augment_ek(const Example& example,
                                             const SentimentLexicon& lexicon);

// Removes exactly the substituted positions of a successful attack.
// Returns nothing for an empty substitution map; throws on bad positions.
std::optional<AugmentationRecord> augment_adv(const Example& example,
                                              const SubstitutionMap& substitutions);

struct ExtendCounts {
  size_t train_added = 0;
  size_t dev_added = 0;
};

// Appends each augmented example to the split of its source and extends the
// label set with AUG. Test examples must never be sources.
Dataset extend_dataset(const Dataset& data, const std::vector<AugmentationRecord>& records,
                       ExtendCounts* counts = nullptr);

// Log line per record: source_id<TAB>method<TAB>comma-joined removed positions.
void write_augment_log(std::ostream& out, const std::vector<AugmentationRecord>& records);

// Rebuilds the full records against the original dataset.
std::vector<AugmentationRecord> read_augment_log(std::istream& in, const Dataset& data);

}  // namespace sentaug
