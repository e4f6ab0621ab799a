#include "sentaug/attack.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace sentaug {

double BigramLm::log_prob(const std::string& prev, const std::string& word) const {
  long c = 0;
  auto it = bigrams_.find(prev);
  if (it != bigrams_.end()) {
    auto jt = it->second.find(word);
    if (jt != it->second.end()) c = jt->second;
  }
  long total = 0;
  auto tt = context_totals_.find(prev);
  if (tt != context_totals_.end()) total = tt->second;
  const double v = static_cast<double>(vocab_.size());
  return std::log((static_cast<double>(c) + 1.0) / (static_cast<double>(total) + v));
}

double BigramLm::score(const std::vector<std::string>& left, const std::string& word,
                       const std::vector<std::string>& right) const {
  double s = log_prob(left.empty() ? "<s>" : left.back(), word);
  if (!right.empty()) s += log_prob(word, right.front());
  return s;
}

BigramLm ngram_lm_fit(const Dataset& corpus) {
  if (corpus.train.empty()) throw Error("ngram_lm_fit: empty train split");
  BigramLm lm;
  for (const auto& e : corpus.train) {
    std::string prev = "<s>";
    for (const auto& t : e.tokens) {
      ++lm.bigrams_[prev][t.norm];
      ++lm.context_totals_[prev];
      lm.vocab_.insert(t.norm);
      prev = t.norm;
    }
  }
  return lm;
}

void AttackConfig::validate() const {
  if (max_generations < 1) throw Error("attack: max_generations must be >= 1");
  if (population_size < 1) throw Error("attack: population_size must be >= 1");
  if (neighbors < 1) throw Error("attack: neighbors must be >= 1");
  if (kept_candidates < 1 || kept_candidates > neighbors)
    throw Error("attack: kept_candidates must be in [1, neighbors]");
  if (change_budget < 0 || change_budget > 1)
    throw Error("attack: change_budget must be in [0, 1]");
}

std::string attack_status_to_string(AttackStatus s) {
  switch (s) {
    case AttackStatus::Success: return "SUCCESS";
    case AttackStatus::FailedBudget: return "FAILED_BUDGET";
    case AttackStatus::SkippedMisclassified: return "SKIPPED_MISCLASSIFIED";
  }
  throw Error("bad attack status");
}

AttackStatus attack_status_from_string(const std::string& s) {
  if (s == "SUCCESS") return AttackStatus::Success;
  if (s == "FAILED_BUDGET") return AttackStatus::FailedBudget;
  if (s == "SKIPPED_MISCLASSIFIED") return AttackStatus::SkippedMisclassified;
  throw Error("unknown attack status '" + s + "'");
}

namespace {

int max_substitutions(const AttackConfig& config, size_t sentence_len) {
  return static_cast<int>(std::floor(config.change_budget * static_cast<double>(sentence_len)));
}

double target_probability(const Classifier& model, const std::vector<Token>& tokens,
                          int target_base_index) {
  return base_label_probability(model.scores(tokens), model.labels(), target_base_index);
}

}  // namespace

Candidate perturb(const Candidate& candidate, const Example& original, const Classifier& model,
                  const EmbeddingTable& table, const LmScorer& lm, const AttackConfig& config,
                  int target_base_index, Rng& rng) {
  const size_t n = original.tokens.size();
  const int max_subs = max_substitutions(config, n);
  const bool at_budget = static_cast<int>(candidate.substitutions.size()) >= max_subs;

  std::vector<int> eligible;
  for (size_t p = 0; p < n; ++p) {
    if (at_budget && !candidate.substitutions.count(static_cast<int>(p))) continue;
    if (!table.contains(original.tokens[p].norm)) continue;
    eligible.push_back(static_cast<int>(p));
  }
  if (eligible.empty() || table.size() < 2) return candidate;

  const int pos = eligible[rng.next_below(eligible.size())];
  auto neighbors = table.nearest_neighbors(original.tokens[pos].norm, config.neighbors);

  // rank in +-1 context of the current candidate, keep the best under the LM
  std::vector<std::string> left, right;
  if (pos > 0) left.push_back(candidate.tokens[pos - 1].norm);
  if (static_cast<size_t>(pos) + 1 < n) right.push_back(candidate.tokens[pos + 1].norm);
  std::vector<std::pair<double, std::string>> ranked;
  for (const auto& [word, sim] : neighbors) ranked.emplace_back(lm.score(left, word, right), word);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  if (static_cast<int>(ranked.size()) > config.kept_candidates)
    ranked.resize(config.kept_candidates);

  Candidate best = candidate;
  for (const auto& [lm_score, word] : ranked) {
    std::vector<Token> probe = candidate.tokens;
    probe[pos] = make_token(word);
    const double fitness = target_probability(model, probe, target_base_index);
    if (fitness > best.fitness) {
      best.tokens = std::move(probe);
      best.substitutions = candidate.substitutions;
      best.substitutions[pos] = {original.tokens[pos].norm, word};
      best.fitness = fitness;
    }
  }
  return best;
}

AttackResult genetic_attack(const Classifier& model, const Example& example,
                            const EmbeddingTable& table, const LmScorer& lm,
                            const AttackConfig& config) {
  config.validate();
  AttackResult result;
  const size_t n = example.tokens.size();
  if (max_substitutions(config, n) < 1) {
    result.status = AttackStatus::FailedBudget;  // no perturbation is legal
    return result;
  }

  const LabelSet& labels = model.labels();
  const Eigen::VectorXd orig_scores = model.scores(example.tokens);
  const int orig_pred = argmax_label(orig_scores, labels, true);
  if (orig_pred != labels.index_of(example.label)) {
    result.status = AttackStatus::SkippedMisclassified;
    return result;
  }

  int target = -1;
  for (int y = 0; y < static_cast<int>(labels.base.size()); ++y)
    if (y != orig_pred && (target < 0 || orig_scores[y] > orig_scores[target])) target = y;

  Rng rng(mix_seed(config.seed, "genetic-attack"));
  Candidate seed_candidate;
  seed_candidate.tokens = example.tokens;
  seed_candidate.fitness = base_label_probability(orig_scores, labels, target);

  std::vector<Candidate> population;
  population.reserve(config.population_size);
  for (int i = 0; i < config.population_size; ++i)
    population.push_back(perturb(seed_candidate, example, model, table, lm, config, target, rng));

  auto pick_parent = [&](double fitness_sum) -> const Candidate& {
    if (fitness_sum <= 0)
      return population[rng.next_below(population.size())];
    double u = rng.next_real() * fitness_sum;
    double acc = 0;
    for (const auto& c : population) {
      acc += c.fitness;
      if (u < acc) return c;
    }
    return population.back();
  };

  for (int gen = 1; gen <= config.max_generations; ++gen) {
    size_t best = 0;
    double fitness_sum = 0;
    for (size_t i = 0; i < population.size(); ++i) {
      fitness_sum += population[i].fitness;
      if (population[i].fitness > population[best].fitness) best = i;
    }
    result.best_fitness_history.push_back(population[best].fitness);
    result.generations_used = gen;

    if (argmax_label(model.scores(population[best].tokens), labels, true) != orig_pred) {
      result.status = AttackStatus::Success;
      result.final = population[best];
      return result;
    }
    if (gen == config.max_generations) break;

    std::vector<Candidate> next;
    next.reserve(population.size());
    next.push_back(population[best]);  // elitism keeps the best fitness monotone
    const int max_subs = max_substitutions(config, n);
    while (next.size() < population.size()) {
      const Candidate& a = pick_parent(fitness_sum);
      const Candidate& b = pick_parent(fitness_sum);
      const int cut = static_cast<int>(rng.next_below(n + 1));
      Candidate child;
      for (const auto& [p, sub] : a.substitutions)
        if (p < cut) child.substitutions[p] = sub;
      for (const auto& [p, sub] : b.substitutions)
        if (p >= cut) child.substitutions[p] = sub;
      while (static_cast<int>(child.substitutions.size()) > max_subs)
        child.substitutions.erase(std::prev(child.substitutions.end()));
      child.tokens = example.tokens;
      for (const auto& [p, sub] : child.substitutions) child.tokens[p] = make_token(sub.second);
      child.fitness = target_probability(model, child.tokens, target);
      next.push_back(perturb(child, example, model, table, lm, config, target, rng));
    }
    population = std::move(next);
  }
  result.status = AttackStatus::FailedBudget;
  return result;
}

void write_attack_report(std::ostream& out, const std::vector<AttackRecord>& records) {
  for (const auto& rec : records) {
    out << rec.id << '\t' << attack_status_to_string(rec.status) << '\t' << rec.generations
        << '\t';
    bool first = true;
    for (const auto& [p, sub] : rec.substitutions) {
      if (!first) out << ',';
      first = false;
      out << p << ':' << sub.first << '>' << sub.second;
    }
    out << '\n';
  }
}

std::vector<AttackRecord> read_attack_report(std::istream& in) {
  std::vector<AttackRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw Error("attack report line " + std::to_string(line_no) + ": expected 4 fields");
    AttackRecord rec;
    rec.id = fields[0];
    rec.status = attack_status_from_string(fields[1]);
    rec.generations = std::stoi(fields[2]);
    if (!fields[3].empty()) {
      for (const auto& item : split(fields[3], ',')) {
        size_t colon = item.find(':');
        size_t arrow = item.find('>', colon == std::string::npos ? 0 : colon);
        if (colon == std::string::npos || arrow == std::string::npos)
          throw Error("attack report line " + std::to_string(line_no) + ": bad substitution '" +
                      item + "'");
        int pos = std::stoi(item.substr(0, colon));
        rec.substitutions[pos] = {item.substr(colon + 1, arrow - colon - 1),
                                  item.substr(arrow + 1)};
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace sentaug
