#include "xrank/rerank.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "xrank/eval.hpp"

namespace xrank {

void RerankConfig::check() const {
  if (depth < 1) throw ContentError("rerank depth must be >= 1");
}

double weighted_relevance(const SentenceVector& candidate, std::span<const SelectedFact> selected) {
  if (selected.empty()) throw ContentError("weighted_relevance: no selected facts");
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& s : selected) {
    numerator += s.relevance * cosine(candidate, *s.vector);
    denominator += s.relevance;
  }
  if (!(denominator > 0.0)) {
    throw ContentError("weighted_relevance: relevance weights sum to <= 0 (scores not normalized)");
  }
  return numerator / denominator;
}

double rerank_score(const SentenceVector& candidate, std::span<const SelectedFact> selected,
                    const SentenceVector& qa) {
  return weighted_relevance(candidate, selected) * cosine(candidate, qa);
}

RerankResult iterative_rerank(const Ranking& ranking, const RelevanceTable& normalized,
                              const FactVectors& vectors, const SentenceVector& qa,
                              const RerankConfig& cfg) {
  cfg.check();
  RerankResult result{{ranking.qid, {}}, {ranking.qid, {}}};
  const auto& entries = ranking.entries;
  const std::size_t n = entries.size();
  const auto depth = static_cast<std::size_t>(cfg.depth);
  if (n == 0 || depth == 1) {
    result.ranking = ranking;
    return result;
  }

  // Only the first 2*depth - 1 positions can ever enter a candidate window.
  const std::size_t reach = std::min(n, 2 * depth - 1);
  const auto rel_row = normalized.row(ranking.qid);
  std::vector<const SentenceVector*> vecs(reach);
  std::vector<double> relevance(reach);
  std::vector<double> qa_sim(reach);
  for (std::size_t j = 0; j < reach; ++j) {
    vecs[j] = &vectors.at(entries[j].uid);
    relevance[j] = rel_row(normalized.col_of(entries[j].uid));
    qa_sim[j] = cosine(*vecs[j], qa);
  }

  // Running numerator of the weighted relevance per position, accumulated in
  // selection order so it matches weighted_relevance term for term.
  std::vector<double> numerator(reach, 0.0);
  double denominator = 0.0;
  std::vector<bool> taken(n, false);
  std::vector<std::size_t> order;
  order.reserve(depth);

  auto select = [&](std::size_t s) {
    taken[s] = true;
    order.push_back(s);
    for (std::size_t j = 0; j < reach; ++j) {
      if (!taken[j]) numerator[j] += relevance[s] * cosine(*vecs[j], *vecs[s]);
    }
    denominator += relevance[s];
  };

  select(0);
  while (order.size() < depth && order.size() < n) {
    if (!(denominator > 0.0)) {
      throw ContentError("question " + ranking.qid + ": relevance weights sum to <= 0");
    }
    const std::size_t window = std::min(n, depth + order.size());
    RerankRound round;
    std::size_t best = window;
    double best_score = 0.0;
    for (std::size_t j = 0; j < window; ++j) {
      if (taken[j]) continue;
      const double weighted = numerator[j] / denominator;
      const double score = weighted * qa_sim[j];
      round.candidates.push_back({entries[j].uid, j, weighted, qa_sim[j], score});
      if (best == window || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    round.selected = entries[best].uid;
    result.trace.rounds.push_back(std::move(round));
    select(best);
  }

  auto& out = result.ranking.entries;
  out.reserve(n);
  for (auto i : order) out.push_back(entries[i]);
  for (std::size_t j = 0; j < n; ++j) {
    if (!taken[j]) out.push_back(entries[j]);
  }
  return result;
}

std::string RerankTrace::to_text() const {
  std::ostringstream out;
  out << "# " << qid << '\n';
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    auto top = rounds[r].candidates;
    std::stable_sort(top.begin(), top.end(), [](const CandidateScore& a, const CandidateScore& b) {
      return a.score > b.score;
    });
    if (top.size() > 3) top.resize(3);
    out << r + 1 << '\t' << rounds[r].selected;
    for (const auto& c : top) {
      out << '\t' << c.uid << ':' << format_double(c.score) << " (w=" << format_double(c.weighted)
          << ",qa=" << format_double(c.qa_similarity) << ')';
    }
    out << '\n';
  }
  return out.str();
}

std::vector<SweepRow> depth_sweep(std::span<const Ranking> initial,
                                  const RelevanceTable& normalized, const FactVectors& vectors,
                                  const VectorProvider& provider, const Corpus& corpus,
                                  std::span<const int> depths, unsigned jobs) {
  std::vector<const Ranking*> annotated;
  std::vector<SentenceVector> qa_vecs;
  for (const auto& r : initial) {
    const auto* q = corpus.find_question(r.qid);
    if (q == nullptr) throw ContentError("ranking for unknown question '" + r.qid + "'");
    if (!q->annotated()) continue;
    annotated.push_back(&r);
    qa_vecs.push_back(provider.vectorize(qa_text(*q)));
  }
  std::vector<SweepRow> rows;
  for (int depth : depths) {
    const RerankConfig cfg{depth};
    cfg.check();
    std::vector<Ranking> reranked(annotated.size());
    parallel_for(annotated.size(), jobs, [&](std::size_t i) {
      reranked[i] = iterative_rerank(*annotated[i], normalized, vectors, qa_vecs[i], cfg).ranking;
    });
    rows.push_back({depth, map_overall(reranked, corpus), reranked.size()});
  }
  return rows;
}

std::string sweep_to_text(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "depth\tquestions\tMAP\n";
  for (const auto& r : rows) {
    out << r.depth << '\t' << r.n_questions << '\t' << format_double(r.map) << '\n';
  }
  return out.str();
}

}  // namespace xrank
