#include "sentaug/evaluate.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

#include "sentaug/rng.hpp"

namespace sentaug {

std::string polarity_to_string(Polarity p) {
  switch (p) {
    case Polarity::Pos: return "POS";
    case Polarity::Neg: return "NEG";
    case Polarity::None: return "NONE";
  }
  throw Error("bad polarity");
}

PolarityMap default_polarity_map(const LabelSet& labels) {
  PolarityMap map;
  for (const auto& l : labels.base) {
    std::string low = ascii_lower(l);
    if (low == "pos" || low == "positive" || low == "1")
      map[l] = Polarity::Pos;
    else if (low == "neg" || low == "negative" || low == "0")
      map[l] = Polarity::Neg;
    else
      map[l] = Polarity::None;
  }
  if (labels.has_aug()) map[*labels.aug] = Polarity::None;
  return map;
}

Polarity label_polarity(const std::string& label, const PolarityMap& map) {
  auto it = map.find(label);
  if (it == map.end()) throw Error("no polarity mapping for label '" + label + "'");
  return it->second;
}

PolaritySummary score_explanation(const Explanation& explanation,
                                  const SentimentLexicon& lexicon) {
  PolaritySummary sum;
  for (const auto& k : explanation.keywords) {
    if (auto score = lexicon.lookup(k.token)) {
      sum.positive_sum += score->positive;
      sum.negative_sum += score->negative;
    }
  }
  if (sum.positive_sum > sum.negative_sum)
    sum.indicated = Polarity::Pos;
  else if (sum.negative_sum > sum.positive_sum)
    sum.indicated = Polarity::Neg;
  else
    sum.indicated = Polarity::None;
  return sum;
}

bool is_coherent(Polarity indicated, Polarity prediction, Polarity gold) {
  if (indicated != Polarity::None) return indicated == prediction;
  return prediction != gold;
}

CoherenceReport coherence(const std::vector<Explanation>& explanations,
                          const std::vector<std::string>& predictions,
                          const std::vector<std::string>& golds, const SentimentLexicon& lexicon,
                          const PolarityMap& polarity_map) {
  if (explanations.size() != predictions.size() || explanations.size() != golds.size())
    throw Error("coherence: explanations/predictions/golds length mismatch");
  if (explanations.empty()) throw Error("coherence: no explanations");
  CoherenceReport report;
  report.total = explanations.size();
  for (size_t i = 0; i < explanations.size(); ++i) {
    const auto& e = explanations[i];
    PolaritySummary sum = score_explanation(e, lexicon);
    CoherenceRecord rec;
    rec.id = e.example_id;
    rec.model = e.model_tag;
    rec.method = explain_method_to_string(e.method);
    rec.prediction = predictions[i];
    rec.gold = golds[i];
    rec.indicated = sum.indicated;
    rec.positive_sum = sum.positive_sum;
    rec.negative_sum = sum.negative_sum;
    rec.coherent = is_coherent(sum.indicated, label_polarity(predictions[i], polarity_map),
                               label_polarity(golds[i], polarity_map));
    if (rec.coherent) ++report.coherent_count;
    report.records.push_back(std::move(rec));
  }
  return report;
}

CoherenceReport coherence(const std::vector<Explanation>& explanations,
                          const SentimentLexicon& lexicon, const PolarityMap& polarity_map) {
  std::vector<std::string> preds, golds;
  preds.reserve(explanations.size());
  golds.reserve(explanations.size());
  for (const auto& e : explanations) {
    preds.push_back(e.prediction);
    golds.push_back(e.gold);
  }
  return coherence(explanations, preds, golds, lexicon, polarity_map);
}

HumanEvalExport export_human_eval(const std::vector<HumanEvalPair>& pairs, uint64_t seed) {
  Rng rng(mix_seed(seed, "human-eval"));
  HumanEvalExport out;
  for (const auto& p : pairs) {
    bool first_a = rng.next_coin();
    out.first_in_slot_a[p.pair_id] = first_a;
    HumanEvalRow row;
    row.pair_id = p.pair_id;
    row.text = p.text;
    row.prediction = p.prediction;
    row.keywords_a = first_a ? p.keywords_first : p.keywords_second;
    row.keywords_b = first_a ? p.keywords_second : p.keywords_first;
    out.sheet.rows.push_back(std::move(row));
  }
  return out;
}

HumanEvalReport ingest_human_eval(const HumanEvalSheet& sheet,
                                  const std::map<std::string, bool>& first_in_slot_a) {
  HumanEvalReport report;
  report.total = sheet.rows.size();
  if (sheet.rows.empty()) return report;
  double sum_first = 0, sum_second = 0, pref_first = 0, pref_second = 0;
  for (size_t i = 0; i < sheet.rows.size(); ++i) {
    const auto& row = sheet.rows[i];
    auto where = [&](const char* what) {
      return "sheet row " + std::to_string(i + 1) + " (" + row.pair_id + "): " + what;
    };
    if (row.score_a != 0 && row.score_a != 1) throw Error(where("score_A must be 0 or 1"));
    if (row.score_b != 0 && row.score_b != 1) throw Error(where("score_B must be 0 or 1"));
    if (row.preferred != 'A' && row.preferred != 'B')
      throw Error(where("preferred must be A or B"));
    auto it = first_in_slot_a.find(row.pair_id);
    if (it == first_in_slot_a.end()) throw Error(where("no assignment for pair"));
    const bool first_a = it->second;
    sum_first += first_a ? row.score_a : row.score_b;
    sum_second += first_a ? row.score_b : row.score_a;
    const bool preferred_first = (row.preferred == 'A') == first_a;
    pref_first += preferred_first ? 1 : 0;
    pref_second += preferred_first ? 0 : 1;
  }
  const auto n = static_cast<double>(report.total);
  report.score_first = sum_first / n;
  report.score_second = sum_second / n;
  report.preferred_first = pref_first / n;
  report.preferred_second = pref_second / n;
  return report;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> csv_parse_line(const std::string& line, size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw Error("sheet line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

constexpr const char* kSheetHeader =
    "pair_id,text,prediction,keywords_A,keywords_B,score_A,score_B,preferred";

}  // namespace

void write_sheet_csv(std::ostream& out, const HumanEvalSheet& sheet) {
  out << kSheetHeader << '\n';
  for (const auto& row : sheet.rows) {
    out << csv_quote(row.pair_id) << ',' << csv_quote(row.text) << ','
        << csv_quote(row.prediction) << ',' << csv_quote(row.keywords_a) << ','
        << csv_quote(row.keywords_b) << ',';
    if (row.score_a >= 0) out << row.score_a;
    out << ',';
    if (row.score_b >= 0) out << row.score_b;
    out << ',';
    if (row.preferred) out << row.preferred;
    out << '\n';
  }
}

HumanEvalSheet read_sheet_csv(std::istream& in) {
  HumanEvalSheet sheet;
  std::string line;
  size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != kSheetHeader)
        throw Error("sheet line 1: unexpected header '" + line + "'");
      saw_header = true;
      continue;
    }
    auto fields = csv_parse_line(line, line_no);
    if (fields.size() != 8)
      throw Error("sheet line " + std::to_string(line_no) + ": expected 8 fields, got " +
                  std::to_string(fields.size()));
    HumanEvalRow row;
    row.pair_id = fields[0];
    row.text = fields[1];
    row.prediction = fields[2];
    row.keywords_a = fields[3];
    row.keywords_b = fields[4];
    auto parse_mark = [&](const std::string& s, const char* what) -> int {
      if (s.empty()) return -1;
      if (s == "0") return 0;
      if (s == "1") return 1;
      throw Error("sheet line " + std::to_string(line_no) + ": " + what + " '" + s +
                  "' must be 0 or 1");
    };
    row.score_a = parse_mark(fields[5], "score_A");
    row.score_b = parse_mark(fields[6], "score_B");
    if (!fields[7].empty()) {
      if (fields[7] != "A" && fields[7] != "B")
        throw Error("sheet line " + std::to_string(line_no) + ": preferred must be A or B");
      row.preferred = fields[7][0];
    }
    sheet.rows.push_back(std::move(row));
  }
  if (!saw_header) throw Error("sheet: missing header");
  return sheet;
}

void write_assignment(std::ostream& out, const std::map<std::string, bool>& first_in_slot_a) {
  for (const auto& [pair_id, first_a] : first_in_slot_a)
    out << pair_id << '\t' << (first_a ? "first" : "second") << '\n';
}

std::map<std::string, bool> read_assignment(std::istream& in) {
  std::map<std::string, bool> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || (fields[1] != "first" && fields[1] != "second"))
      throw Error("assignment line " + std::to_string(line_no) +
                  ": expected pair_id<TAB>first|second");
    out[fields[0]] = fields[1] == "first";
  }
  return out;
}

}  // namespace sentaug
