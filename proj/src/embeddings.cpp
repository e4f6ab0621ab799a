#include "sentaug/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <sstream>

#include "sentaug/rng.hpp"

namespace sentaug {

namespace {

constexpr char kCacheMagic[4] = {'E', 'M', 'B', '1'};
constexpr double kOovRange = 0.25;

bool is_special(const std::string& w) { return w == "<pad>" || w == "<unk>"; }

Eigen::VectorXd seeded_oov(const std::string& word, uint64_t oov_seed, int dim) {
  Rng rng(mix_seed(oov_seed, word));
  Eigen::VectorXd v(dim);
  for (int j = 0; j < dim; ++j) v[j] = rng.next_real(-kOovRange, kOovRange);
  return v;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& what) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("embedding cache: truncated " + what);
  return v;
}

}  // namespace

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd rows)
    : words_(std::move(words)), rows_(std::move(rows)) {
  if (static_cast<Eigen::Index>(words_.size()) != rows_.rows())
    throw Error("embedding table: word/row count mismatch");
  for (size_t i = 0; i < words_.size(); ++i) index_[words_[i]] = static_cast<int>(i);
}

Eigen::VectorXd EmbeddingTable::vector(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) throw Error("word '" + word + "' not in embedding table");
  return rows_.row(it->second).transpose();
}

std::vector<std::pair<std::string, double>> EmbeddingTable::nearest_neighbors(
    const std::string& word, int k) const {
  if (k < 1) throw Error("nearest_neighbors: k must be >= 1");
  auto it = index_.find(word);
  if (it == index_.end()) throw Error("word '" + word + "' not in embedding table");
  Eigen::VectorXd q = rows_.row(it->second).transpose();
  std::vector<std::pair<std::string, double>> sims;
  sims.reserve(words_.size());
  for (size_t i = 0; i < words_.size(); ++i) {
    if (static_cast<int>(i) == it->second) continue;
    sims.emplace_back(words_[i], cosine(q, rows_.row(i).transpose()));
  }
  std::sort(sims.begin(), sims.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (static_cast<size_t>(k) < sims.size()) sims.resize(k);
  return sims;
}

EmbeddingTable EmbeddingTable::load_text(std::istream& in, const Vocabulary& vocab,
                                         uint64_t oov_seed) {
  std::unordered_map<std::string, Eigen::VectorXd> file_vecs;
  int dim = -1;
  std::string line;
  size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    std::vector<double> vals;
    double x;
    while (ss >> x) vals.push_back(x);
    if (first) {
      first = false;
      // optional "count dim" header: two bare integers
      bool numeric = !word.empty() && word.find_first_not_of("0123456789") == std::string::npos;
      if (numeric && vals.size() == 1 && ss.eof() && vals[0] == std::floor(vals[0])) continue;
    }
    if (!ss.eof())
      throw Error("embeddings line " + std::to_string(line_no) + ": non-numeric component");
    if (vals.empty())
      throw Error("embeddings line " + std::to_string(line_no) + ": no vector components");
    if (dim < 0) dim = static_cast<int>(vals.size());
    if (static_cast<int>(vals.size()) != dim)
      throw Error("embeddings line " + std::to_string(line_no) + ": expected " +
                  std::to_string(dim) + " components, got " + std::to_string(vals.size()));
    Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(vals.data(), dim);
    file_vecs[word] = std::move(v);
  }
  if (dim < 0) throw Error("embeddings: empty file");

  std::vector<std::string> words;
  Eigen::MatrixXd rows(0, dim);
  std::vector<Eigen::VectorXd> vecs;
  for (const auto& w : vocab.words) {
    if (is_special(w)) continue;
    words.push_back(w);
    auto it = file_vecs.find(w);
    vecs.push_back(it != file_vecs.end() ? it->second : seeded_oov(w, oov_seed, dim));
  }
  rows.resize(static_cast<Eigen::Index>(words.size()), dim);
  for (size_t i = 0; i < vecs.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = vecs[i];
  return EmbeddingTable(std::move(words), std::move(rows));
}

EmbeddingTable EmbeddingTable::random_init(const Vocabulary& vocab, int dim, uint64_t seed) {
  std::vector<std::string> words;
  for (const auto& w : vocab.words)
    if (!is_special(w)) words.push_back(w);
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(words.size()), dim);
  for (size_t i = 0; i < words.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = seeded_oov(words[i], seed, dim).transpose();
  return EmbeddingTable(std::move(words), std::move(rows));
}

void EmbeddingTable::save_cache(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out.write(kCacheMagic, 4);
  write_pod<uint32_t>(out, static_cast<uint32_t>(dim()));
  write_pod<uint64_t>(out, static_cast<uint64_t>(words_.size()));
  for (size_t i = 0; i < words_.size(); ++i) {
    write_pod<uint32_t>(out, static_cast<uint32_t>(words_[i].size()));
    out.write(words_[i].data(), static_cast<std::streamsize>(words_[i].size()));
    for (int j = 0; j < dim(); ++j) write_pod<double>(out, rows_(static_cast<Eigen::Index>(i), j));
  }
}

EmbeddingTable EmbeddingTable::load_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kCacheMagic, 4) != 0)
    throw Error(path + ": not an embedding cache");
  auto dim = read_pod<uint32_t>(in, "dim");
  auto count = read_pod<uint64_t>(in, "count");
  std::vector<std::string> words;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (uint64_t i = 0; i < count; ++i) {
    auto len = read_pod<uint32_t>(in, "word length");
    std::string w(len, '\0');
    in.read(w.data(), len);
    if (!in) throw Error(path + ": truncated word");
    for (uint32_t j = 0; j < dim; ++j)
      rows(static_cast<Eigen::Index>(i), j) = read_pod<double>(in, "component");
    words.push_back(std::move(w));
  }
  return EmbeddingTable(std::move(words), std::move(rows));
}

EmbeddingTable EmbeddingTable::load_file(const std::string& path, const Vocabulary& vocab,
                                         uint64_t oov_seed) {
  {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw Error("cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    probe.read(magic, 4);
    if (probe && std::memcmp(magic, kCacheMagic, 4) == 0) return load_cache(path);
  }
  std::ifstream in(path, std::ios::binary);
  return load_text(in, vocab, oov_seed);
}

void EmbeddingTable::save_text(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << words_.size() << ' ' << dim() << '\n';
  for (size_t i = 0; i < words_.size(); ++i) {
    out << words_[i];
    for (int j = 0; j < dim(); ++j)
      out << ' ' << fmt_real(rows_(static_cast<Eigen::Index>(i), j));
    out << '\n';
  }
}

}  // namespace sentaug
