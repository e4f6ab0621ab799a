#include "sentaug/augment.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

namespace sentaug {

std::string augment_method_to_string(AugmentMethod m) {
  return m == AugmentMethod::Ek ? "ek" : "adv";
}

AugmentMethod augment_method_from_string(const std::string& s) {
  if (s == "ek") return AugmentMethod::Ek;
  if (s == "adv") return AugmentMethod::Adv;
  throw Error("unknown augmentation method '" + s + "'");
}

namespace {

std::optional<AugmentationRecord> remove_positions(const Example& example,
                                                   const std::vector<int>& positions,
                                                   AugmentMethod method) {
  if (positions.empty()) return std::nullopt;
  if (positions.size() >= example.tokens.size()) return std::nullopt;  // nothing would remain
  AugmentationRecord rec;
  rec.source_id = example.id;
  rec.removed_positions = positions;
  rec.method = method;
  rec.result.id = example.id + "#" + augment_method_to_string(method);
  rec.result.label = kAugLabel;
  rec.result.origin = method == AugmentMethod::Ek ? Origin::AugEk : Origin::AugAdv;
  rec.result.source_id = example.id;
  size_t next = 0;
  for (size_t i = 0; i < example.tokens.size(); ++i) {
    if (next < positions.size() && static_cast<size_t>(positions[next]) == i) {
      ++next;
      continue;
    }
    rec.result.tokens.push_back(example.tokens[i]);
  }
  return rec;
}

}  // namespace

std::optional<AugmentationRecord> augment_ek(const Example& example,
                                             const SentimentLexicon& lexicon) {
  if (example.origin != Origin::Original)
    throw Error("augment_ek: source " + example.id + " is not an original example");
  std::vector<int> removed;
  for (size_t i = 0; i < example.tokens.size(); ++i) {
    const Token& t = example.tokens[i];
    if (is_punct_token(t)) continue;  // punctuation is never a sentiment word
    if (lexicon.is_sentiment_word(t)) removed.push_back(static_cast<int>(i));
  }
  return remove_positions(example, removed, AugmentMethod::Ek);
}

std::optional<AugmentationRecord> augment_adv(const Example& example,
                                              const SubstitutionMap& substitutions) {
  std::vector<int> removed;
  for (const auto& [pos, words] : substitutions) {
    if (pos < 0 || static_cast<size_t>(pos) >= example.tokens.size())
      throw Error("augment_adv: position " + std::to_string(pos) + " out of range for " +
                  example.id);
    removed.push_back(pos);
  }
  return remove_positions(example, removed, AugmentMethod::Adv);
}

Dataset extend_dataset(const Dataset& data, const std::vector<AugmentationRecord>& records,
                       ExtendCounts* counts) {
  Dataset out = data;
  if (counts) *counts = {};
  if (records.empty()) return out;

  std::unordered_map<std::string, int> where;  // 0 = train, 1 = dev
  for (const auto& e : data.train) where[e.id] = 0;
  for (const auto& e : data.dev) where[e.id] = 1;
  std::set<std::string> test_ids;
  for (const auto& e : data.test) test_ids.insert(e.id);

  out.labels.aug = kAugLabel;
  out.labels.validate();
  for (const auto& rec : records) {
    if (test_ids.count(rec.source_id))
      throw Error("extend_dataset: record sourced from test example " + rec.source_id);
    auto it = where.find(rec.source_id);
    if (it == where.end())
      throw Error("extend_dataset: unknown source example " + rec.source_id);
    if (it->second == 0) {
      out.train.push_back(rec.result);
      if (counts) ++counts->train_added;
    } else {
      out.dev.push_back(rec.result);
      if (counts) ++counts->dev_added;
    }
  }
  out.validate();
  return out;
}

void write_augment_log(std::ostream& out, const std::vector<AugmentationRecord>& records) {
  for (const auto& rec : records) {
    out << rec.source_id << '\t' << augment_method_to_string(rec.method) << '\t';
    for (size_t i = 0; i < rec.removed_positions.size(); ++i) {
      if (i) out << ',';
      out << rec.removed_positions[i];
    }
    out << '\n';
  }
}

std::vector<AugmentationRecord> read_augment_log(std::istream& in, const Dataset& data) {
  std::unordered_map<std::string, const Example*> by_id;
  for (const auto& e : data.train) by_id[e.id] = &e;
  for (const auto& e : data.dev) by_id[e.id] = &e;

  std::vector<AugmentationRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw Error("augment log line " + std::to_string(line_no) + ": expected 3 fields");
    auto it = by_id.find(fields[0]);
    if (it == by_id.end())
      throw Error("augment log line " + std::to_string(line_no) + ": unknown source " +
                  fields[0]);
    AugmentMethod method = augment_method_from_string(fields[1]);
    std::vector<int> positions;
    for (const auto& p : split(fields[2], ','))
      if (!p.empty()) positions.push_back(std::stoi(p));
    if (!std::is_sorted(positions.begin(), positions.end()))
      throw Error("augment log line " + std::to_string(line_no) + ": positions not increasing");
    for (int p : positions)
      if (p < 0 || static_cast<size_t>(p) >= it->second->tokens.size())
        throw Error("augment log line " + std::to_string(line_no) + ": position out of range");
    auto rec = remove_positions(*it->second, positions, method);
    if (!rec)
      throw Error("augment log line " + std::to_string(line_no) + ": degenerate record");
    out.push_back(std::move(*rec));
  }
  return out;
}

}  // namespace sentaug
