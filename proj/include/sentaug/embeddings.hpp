#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "sentaug/corpus.hpp"

namespace sentaug {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> words, Eigen::MatrixXd rows);  // rows: n x d

  int dim() const { return static_cast<int>(rows_.cols()); }
  size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  bool contains(const std::string& word) const { return index_.count(word) > 0; }
  Eigen::VectorXd vector(const std::string& word) const;  // throws if absent

  // Top-k by cosine similarity, query excluded, ties broken lexicographically.
  std::vector<std::pair<std::string, double>> nearest_neighbors(const std::string& word,
                                                                int k) const;

  // Text format: optional "count dim" header, then "word v1 ... vd" lines.
  // The table is restricted to vocab words; vocab words missing from the file
  // get a per-word seeded uniform sample in [-0.25, 0.25]^d.
  static EmbeddingTable load_text(std::istream& in, const Vocabulary& vocab, uint64_t oov_seed);

  // Fully random table over the vocabulary (no pretrained file available).
  static EmbeddingTable random_init(const Vocabulary& vocab, int dim, uint64_t seed);

  // Binary cache: magic EMB1, little-endian u32 dim, then length-prefixed
  // word/vector records.
  void save_cache(const std::string& path) const;
  static EmbeddingTable load_cache(const std::string& path);

  // Auto-detects the binary cache vs the text format.
  static EmbeddingTable load_file(const std::string& path, const Vocabulary& vocab,
                                  uint64_t oov_seed);

  void save_text(const std::string& path) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
  Eigen::MatrixXd rows_;  // one row per word
};

}  // namespace sentaug
