#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xrank/corpus.hpp"
#include "xrank/textsim.hpp"

namespace xrank {

// Dense relevance scores: one row per question, one column per fact uid.
class RelevanceTable {
 public:
  RelevanceTable() = default;
  RelevanceTable(std::vector<std::string> qids, std::vector<std::string> uids,
                 Eigen::MatrixXd scores);

  const std::vector<std::string>& qids() const { return qids_; }
  const std::vector<std::string>& uids() const { return uids_; }
  const Eigen::MatrixXd& scores() const { return scores_; }

  bool has_question(std::string_view qid) const;
  Eigen::Index row_of(std::string_view qid) const;   // throws ContentError
  Eigen::Index col_of(std::string_view uid) const;   // throws ContentError
  double score(std::string_view qid, std::string_view uid) const;

  auto row(std::string_view qid) const { return scores_.row(row_of(qid)); }

 private:
  std::vector<std::string> qids_;
  std::vector<std::string> uids_;
  std::unordered_map<std::string, Eigen::Index> qid_index_;
  std::unordered_map<std::string, Eigen::Index> uid_index_;
  Eigen::MatrixXd scores_;
};

struct RankedFact {
  std::string uid;
  double score = 0.0;

  bool operator==(const RankedFact&) const = default;
};

struct Ranking {
  std::string qid;
  std::vector<RankedFact> entries;

  std::vector<std::string> uids() const;
  bool operator==(const Ranking&) const = default;
};

enum class LexicalMethod { kTfidfCosine, kOverlap };

// Scores every question of the corpus against every fact.
RelevanceTable score_lexical(const Corpus& corpus, const VectorProvider& provider,
                             LexicalMethod method, unsigned jobs = 1);

// |qa tokens ∩ fact tokens| / |fact tokens|, stop-words removed, over
// distinct tokens; 0 when either side is empty.
double overlap_score(std::string_view qa, std::string_view fact_text);

// Reads "qid<TAB>fact_uid<TAB>score" lines (an optional header row is
// skipped). Missing pairs get the question's minimum score minus 1.
RelevanceTable load_scores(const std::filesystem::path& path, const FactTable& facts,
                           Diagnostics* diag = nullptr);
void write_scores(const RelevanceTable& table, const std::filesystem::path& path);

// Descending score, ascending uid on ties.
Ranking initial_ranking(const RelevanceTable& table, std::string_view qid);

inline constexpr double kNormalizeFloor = 1e-6;

// Per-question min-max rescale to [1e-6, 1]; constant rows become all 1.
RelevanceTable normalize(const RelevanceTable& table);

}  // namespace xrank
