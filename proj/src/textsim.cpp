#include "xrank/textsim.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <sstream>

namespace xrank {

namespace {

// Fixed list; changing it changes every TF-IDF score, so it is versioned
// with the README.
constexpr std::array<std::string_view, 64> kStopwords = {
    "a",     "about", "an",    "and",   "are",  "as",    "at",    "be",
    "been",  "but",   "by",    "can",   "could", "did",  "do",    "does",
    "for",   "from",  "had",   "has",   "have", "he",    "her",   "his",
    "how",   "i",     "if",    "in",    "into", "is",    "it",    "its",
    "may",   "me",    "might", "my",    "no",   "not",   "of",    "on",
    "or",    "our",   "she",   "should", "so",  "than",  "that",  "the",
    "their", "them",  "then",  "there", "these", "they", "this",  "those",
    "to",    "was",   "we",    "were",  "what", "which", "will",  "with",
};

bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

TokenList tokenize(std::string_view text, bool drop_stopwords) {
  TokenList tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!drop_stopwords || !is_stopword(current)) tokens.push_back(current);
    current.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_token_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

Eigen::Index SentenceVector::dimension() const {
  return is_sparse() ? sparse().size() : dense().size();
}

double SentenceVector::dot(const SentenceVector& other) const {
  if (is_sparse() != other.is_sparse() || dimension() != other.dimension()) {
    throw ContentError("sentence vector mismatch: dimension " + std::to_string(dimension()) +
                       " vs " + std::to_string(other.dimension()));
  }
  return is_sparse() ? sparse().dot(other.sparse()) : dense().dot(other.dense());
}

SentenceVector SentenceVector::scaled(double c) const {
  if (is_sparse()) return SentenceVector(Sparse(sparse() * c));
  return SentenceVector(Dense(dense() * c));
}

double cosine(const SentenceVector& u, const SentenceVector& v) {
  const double d = u.dot(v);
  if (u.norm() == 0.0 || v.norm() == 0.0) return 0.0;
  return std::clamp(d / (u.norm() * v.norm()), -1.0, 1.0);
}

VectorProvider VectorProvider::build_tfidf(std::span<const std::string> texts,
                                           bool drop_stopwords) {
  if (texts.empty()) throw ContentError("build_tfidf: no texts");
  std::map<std::string, std::size_t> df;
  std::size_t nonempty = 0;
  for (const auto& text : texts) {
    auto tokens = tokenize(text, drop_stopwords);
    if (!tokens.empty()) ++nonempty;
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    for (auto& t : tokens) ++df[std::move(t)];
  }
  if (nonempty == 0) throw ContentError("build_tfidf: all texts are empty after tokenization");

  VectorProvider p;
  p.mode_ = VectorMode::kTfidf;
  p.drop_stopwords_ = drop_stopwords;
  p.idf_.resize(static_cast<Eigen::Index>(df.size()));
  const double n = static_cast<double>(texts.size());
  Eigen::Index id = 0;
  for (const auto& [term, count] : df) {
    p.terms_.push_back(term);
    p.term_ids_.emplace(term, id);
    p.idf_[id] = std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0;
    ++id;
  }
  return p;
}

VectorProvider VectorProvider::from_embeddings(std::vector<std::string> words,
                                               Eigen::MatrixXd rows) {
  if (static_cast<Eigen::Index>(words.size()) != rows.rows()) {
    throw ContentError("from_embeddings: word count does not match row count");
  }
  VectorProvider p;
  p.mode_ = VectorMode::kDense;
  p.drop_stopwords_ = false;
  for (std::size_t i = 0; i < words.size(); ++i) {
    p.term_ids_.emplace(words[i], static_cast<Eigen::Index>(i));  // first wins
  }
  p.terms_ = std::move(words);
  p.embeddings_ = std::move(rows);
  return p;
}

VectorProvider VectorProvider::load_dense(const std::filesystem::path& path) {
  const auto lines = tsv::read_lines(path);
  std::vector<std::string> words;
  std::vector<double> values;
  Eigen::Index dim = -1;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::istringstream in(lines[ln]);
    std::vector<std::string> fields;
    for (std::string f; in >> f;) fields.push_back(std::move(f));
    if (fields.empty()) continue;
    if (ln == 0 && fields.size() == 2 &&
        std::all_of(fields[0].begin(), fields[0].end(), ::isdigit) &&
        std::all_of(fields[1].begin(), fields[1].end(), ::isdigit)) {
      dim = std::stol(fields[1]);
      continue;
    }
    const auto row_dim = static_cast<Eigen::Index>(fields.size()) - 1;
    if (dim < 0) dim = row_dim;
    if (row_dim != dim || row_dim == 0) {
      throw FormatError(path.string() + ":" + std::to_string(ln + 1) + ": expected " +
                        std::to_string(dim) + " values, found " + std::to_string(row_dim));
    }
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0;
      if (!parse_double(fields[i], v)) {
        throw FormatError(path.string() + ":" + std::to_string(ln + 1) + ": bad value '" +
                          fields[i] + "'");
      }
      values.push_back(v);
    }
    words.push_back(fields[0]);
  }
  if (words.empty() || dim <= 0) throw FormatError(path.string() + ": no word vectors");
  Eigen::MatrixXd rows =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          values.data(), static_cast<Eigen::Index>(words.size()), dim);
  return from_embeddings(std::move(words), std::move(rows));
}

Eigen::Index VectorProvider::dimension() const {
  return mode_ == VectorMode::kTfidf ? idf_.size() : embeddings_.cols();
}

double VectorProvider::idf(std::string_view term) const {
  const auto it = term_ids_.find(std::string(term));
  if (mode_ != VectorMode::kTfidf || it == term_ids_.end()) return std::nan("");
  return idf_[it->second];
}

SentenceVector VectorProvider::vectorize(std::string_view text) const {
  const auto tokens = tokenize(text, drop_stopwords_);
  if (mode_ == VectorMode::kTfidf) {
    std::map<Eigen::Index, double> counts;
    for (const auto& t : tokens) {
      const auto it = term_ids_.find(t);
      if (it != term_ids_.end()) counts[it->second] += 1.0;
    }
    SentenceVector::Sparse v(idf_.size());
    v.reserve(static_cast<Eigen::Index>(counts.size()));
    for (const auto& [id, tf] : counts) v.insertBack(id) = tf * idf_[id];
    return SentenceVector(std::move(v));
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(embeddings_.cols());
  int hits = 0;
  for (const auto& t : tokens) {
    const auto it = term_ids_.find(t);
    if (it == term_ids_.end()) continue;
    sum += embeddings_.row(it->second).transpose();
    ++hits;
  }
  if (hits > 0) sum /= static_cast<double>(hits);
  return SentenceVector(std::move(sum));
}

std::string qa_text(const Question& q) {
  return trim(q.stem + " " + answer_text(q));
}

VectorProvider build_default_provider(const Corpus& corpus) {
  std::vector<std::string> texts;
  texts.reserve(corpus.facts().size() + corpus.questions().size());
  for (const auto& f : corpus.facts()) texts.push_back(f.text);
  for (const auto& q : corpus.questions()) texts.push_back(qa_text(q));
  return VectorProvider::build_tfidf(texts);
}

FactVectors::FactVectors(const FactTable& facts, const VectorProvider& provider,
                         unsigned jobs) {
  const auto& all = facts.facts();
  std::vector<SentenceVector> vecs(all.size());
  parallel_for(all.size(), jobs, [&](std::size_t i) { vecs[i] = provider.vectorize(all[i].text); });
  for (std::size_t i = 0; i < all.size(); ++i) add(all[i].uid, std::move(vecs[i]));
}

void FactVectors::add(std::string uid, SentenceVector vec) {
  if (index_.contains(uid)) throw ContentError("duplicate fact vector for '" + uid + "'");
  index_.emplace(uid, uids_.size());
  uids_.push_back(std::move(uid));
  vectors_.push_back(std::move(vec));
}

const SentenceVector& FactVectors::at(std::string_view uid) const {
  const auto it = index_.find(std::string(uid));
  if (it == index_.end()) throw ContentError("no vector for fact '" + std::string(uid) + "'");
  return vectors_[it->second];
}

}  // namespace xrank
