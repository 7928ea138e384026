#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "xrank/corpus.hpp"
#include "xrank/scorer.hpp"
#include "xrank/textsim.hpp"

namespace xrank {

struct RerankConfig {
  // Number of top positions finalized, counting the fixed first fact; 1 is a no-op.
  int depth = 15;

  void check() const;
};

struct SelectedFact {
  const SentenceVector* vector;
  double relevance;
};

// sum_k rel_k * cos(candidate, fact_k) / sum_k rel_k over the selected facts.
// Throws ContentError when `selected` is empty or the weights sum to <= 0.
double weighted_relevance(const SentenceVector& candidate, std::span<const SelectedFact> selected);

// weighted_relevance(candidate, selected) * cos(candidate, qa).
double rerank_score(const SentenceVector& candidate, std::span<const SelectedFact> selected,
                    const SentenceVector& qa);

struct CandidateScore {
  std::string uid;
  std::size_t initial_index = 0;  // 0-based position in the input ranking
  double weighted = 0.0;
  double qa_similarity = 0.0;
  double score = 0.0;
};

struct RerankRound {
  std::string selected;
  std::vector<CandidateScore> candidates;  // in initial-rank order
};

struct RerankTrace {
  std::string qid;
  std::vector<RerankRound> rounds;

  // One line per round: round number, selected uid, best three candidates.
  std::string to_text() const;
};

struct RerankResult {
  Ranking ranking;
  RerankTrace trace;
};

// Greedy rebuild of the top `depth` positions. The first fact stays; each
// round picks, among unselected facts at 1-based initial rank
// <= depth + |selected|, the one with the highest rerank_score (earlier
// initial rank wins ties). Everything not selected keeps its input order.
// Relevance comes from `normalized` (row ranking.qid); entry scores in the
// output are carried over from the input unchanged.
RerankResult iterative_rerank(const Ranking& ranking, const RelevanceTable& normalized,
                              const FactVectors& vectors, const SentenceVector& qa,
                              const RerankConfig& cfg);

struct SweepRow {
  int depth = 0;
  double map = 0.0;
  std::size_t n_questions = 0;
};

// Reranks every annotated question at each depth and reports MAP.
// `initial` are the un-reranked rankings; `normalized` supplies relevance.
std::vector<SweepRow> depth_sweep(std::span<const Ranking> initial,
                                  const RelevanceTable& normalized, const FactVectors& vectors,
                                  const VectorProvider& provider, const Corpus& corpus,
                                  std::span<const int> depths, unsigned jobs = 1);

std::string sweep_to_text(std::span<const SweepRow> rows);

}  // namespace xrank
