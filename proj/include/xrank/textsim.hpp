#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "xrank/corpus.hpp"

namespace xrank {

using TokenList = std::vector<std::string>;

// Lowercases and splits on every non-alphanumeric ASCII byte (";" included).
// Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
TokenList tokenize(std::string_view text, bool drop_stopwords = false);

bool is_stopword(std::string_view token);

// Cosine of two dense Eigen expressions; 0 when either norm is 0.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u,
                                 const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  const Scalar c = u.dot(v) / (nu * nv);
  return std::clamp(c, Scalar(-1), Scalar(1));
}

class SentenceVector {
 public:
  using Sparse = Eigen::SparseVector<double>;
  using Dense = Eigen::VectorXd;

  SentenceVector() : SentenceVector(Dense()) {}
  explicit SentenceVector(Sparse v) : data_(std::move(v)) { norm_ = std::get<Sparse>(data_).norm(); }
  explicit SentenceVector(Dense v) : data_(std::move(v)) { norm_ = std::get<Dense>(data_).norm(); }

  bool is_sparse() const { return std::holds_alternative<Sparse>(data_); }
  const Sparse& sparse() const { return std::get<Sparse>(data_); }
  const Dense& dense() const { return std::get<Dense>(data_); }

  Eigen::Index dimension() const;
  double norm() const { return norm_; }
  double dot(const SentenceVector& other) const;

  SentenceVector scaled(double c) const;

 private:
  std::variant<Sparse, Dense> data_;
  double norm_ = 0.0;
};

// Throws ContentError on a representation or dimension mismatch.
double cosine(const SentenceVector& u, const SentenceVector& v);

enum class VectorMode { kTfidf, kDense };

// Maps text to sentence vectors. Immutable after construction.
class VectorProvider {
 public:
  // idf(t) = ln((1 + N) / (1 + df(t))) + 1, tf = raw count.
  static VectorProvider build_tfidf(std::span<const std::string> texts,
                                    bool drop_stopwords = true);

  // word2vec text format; sentence vector = mean of in-vocabulary word vectors.
  static VectorProvider load_dense(const std::filesystem::path& path);

  static VectorProvider from_embeddings(std::vector<std::string> words, Eigen::MatrixXd rows);

  VectorMode mode() const { return mode_; }
  Eigen::Index dimension() const;
  SentenceVector vectorize(std::string_view text) const;

  // TF-IDF mode: vocabulary in term-id order, and idf by term (NaN if absent).
  const std::vector<std::string>& vocabulary() const { return terms_; }
  double idf(std::string_view term) const;

 private:
  VectorMode mode_ = VectorMode::kTfidf;
  bool drop_stopwords_ = true;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, Eigen::Index> term_ids_;
  Eigen::VectorXd idf_;
  Eigen::MatrixXd embeddings_;  // one row per term, dense mode
};

// stem + " " + answer text, trimmed.
std::string qa_text(const Question& q);

// Default backend: TF-IDF over all fact texts and all question qa_texts.
VectorProvider build_default_provider(const Corpus& corpus);

// Sentence vectors for every fact, keyed by uid, in fact-table order.
class FactVectors {
 public:
  FactVectors() = default;
  FactVectors(const FactTable& facts, const VectorProvider& provider, unsigned jobs = 1);

  void add(std::string uid, SentenceVector vec);

  const SentenceVector& at(std::string_view uid) const;
  const std::vector<std::string>& uids() const { return uids_; }
  const std::vector<SentenceVector>& vectors() const { return vectors_; }
  std::size_t size() const { return uids_.size(); }

 private:
  std::vector<std::string> uids_;
  std::vector<SentenceVector> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace xrank
