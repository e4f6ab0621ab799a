#include "sentaug/lexicon.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace sentaug {

namespace {

double parse_score(const std::string& field, const std::string& what, size_t line_no) {
  double v;
  try {
    size_t pos = 0;
    v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument(field);
  } catch (const std::exception&) {
    throw Error("line " + std::to_string(line_no) + ": non-numeric " + what + " '" + field + "'");
  }
  if (v < 0.0 || v > 1.0)
    throw Error("line " + std::to_string(line_no) + ": " + what + " " + field +
                " outside [0,1]");
  return v;
}

bool is_comment_or_blank(const std::string& line) {
  std::string s = trim(line);
  return s.empty() || s[0] == '#';
}

}  // namespace

std::vector<RawSynsetEntry> parse_sentiwordnet(std::istream& in) {
  std::vector<RawSynsetEntry> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_blank(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() < 5)
      throw Error("line " + std::to_string(line_no) + ": expected 6 tab-separated fields");
    RawSynsetEntry e;
    if (fields[0].size() != 1 || std::string("anvr").find(fields[0][0]) == std::string::npos)
      throw Error("line " + std::to_string(line_no) + ": bad POS tag '" + fields[0] + "'");
    e.pos_tag = fields[0][0];
    try {
      e.synset_id = std::stol(fields[1]);
    } catch (const std::exception&) {
      throw Error("line " + std::to_string(line_no) + ": bad synset id '" + fields[1] + "'");
    }
    e.pos_score = parse_score(fields[2], "PosScore", line_no);
    e.neg_score = parse_score(fields[3], "NegScore", line_no);
    if (e.pos_score + e.neg_score > 1.0 + 1e-12)
      throw Error("line " + std::to_string(line_no) + ": PosScore + NegScore > 1");
    for (const auto& term : split(fields[4], ' ')) {
      if (term.empty()) continue;
      size_t hash = term.rfind('#');
      if (hash == std::string::npos || hash == 0)
        throw Error("line " + std::to_string(line_no) + ": term '" + term +
                    "' not in lemma#rank form");
      int rank = 0;
      try {
        rank = std::stoi(term.substr(hash + 1));
      } catch (const std::exception&) {
        throw Error("line " + std::to_string(line_no) + ": bad sense rank in '" + term + "'");
      }
      e.terms.emplace_back(ascii_lower(term.substr(0, hash)), rank);
    }
    if (e.terms.empty())
      throw Error("line " + std::to_string(line_no) + ": no synset terms");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<RawSynsetEntry> parse_simple_lexicon(std::istream& in) {
  std::vector<RawSynsetEntry> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_comment_or_blank(line)) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3)
      throw Error("line " + std::to_string(line_no) + ": expected lemma<TAB>pos<TAB>neg");
    RawSynsetEntry e;
    e.synset_id = static_cast<long>(line_no);
    e.pos_score = parse_score(fields[1], "pos", line_no);
    e.neg_score = parse_score(fields[2], "neg", line_no);
    if (e.pos_score + e.neg_score > 1.0 + 1e-12)
      throw Error("line " + std::to_string(line_no) + ": pos + neg > 1");
    e.terms.emplace_back(ascii_lower(fields[0]), 1);
    out.push_back(std::move(e));
  }
  return out;
}

void write_simple_lexicon(std::ostream& out,
                          const std::vector<std::tuple<std::string, double, double>>& rows) {
  for (const auto& [lemma, pos, neg] : rows)
    out << lemma << '\t' << fmt_real(pos) << '\t' << fmt_real(neg) << '\n';
}

std::optional<SentimentScore> SentimentLexicon::lookup(const std::string& norm) const {
  auto it = scores_.find(norm);
  if (it == scores_.end()) return std::nullopt;
  return it->second;
}

bool SentimentLexicon::is_sentiment_word(const Token& word) const {
  auto score = lookup(word.norm);
  if (!score) return false;
  return std::max(score->positive, score->negative) >= tau_;
}

SentimentLexicon aggregate(const std::vector<RawSynsetEntry>& entries, AggregatePolicy policy,
                           double tau) {
  if (policy != AggregatePolicy::MeanAllSenses) throw Error("unknown aggregation policy");
  if (entries.empty()) throw Error("aggregate: no entries");
  // Collect and sort per-lemma score lists before summing so the result is
  // bitwise independent of entry order.
  std::map<std::string, std::vector<std::pair<double, double>>> per_lemma;
  for (const auto& e : entries)
    for (const auto& [lemma, rank] : e.terms)
      per_lemma[lemma].emplace_back(e.pos_score, e.neg_score);

  std::unordered_map<std::string, SentimentScore> scores;
  scores.reserve(per_lemma.size());
  for (auto& [lemma, list] : per_lemma) {
    std::sort(list.begin(), list.end());
    double pos = 0, neg = 0;
    for (const auto& [p, n] : list) {
      pos += p;
      neg += n;
    }
    SentimentScore s;
    s.positive = pos / static_cast<double>(list.size());
    s.negative = neg / static_cast<double>(list.size());
    s.neutral = 1.0 - s.positive - s.negative;
    scores[lemma] = s;
  }
  return SentimentLexicon(std::move(scores), tau);
}

SentimentLexicon load_lexicon(const std::string& path, double tau) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw Error("cannot open " + path);
  std::string line;
  size_t cols = 0;
  while (std::getline(probe, line)) {
    if (is_comment_or_blank(line)) continue;
    cols = split(line, '\t').size();
    break;
  }
  std::ifstream in(path, std::ios::binary);
  auto entries = cols >= 5 ? parse_sentiwordnet(in) : parse_simple_lexicon(in);
  return aggregate(entries, AggregatePolicy::MeanAllSenses, tau);
}

}  // namespace sentaug
