#include "xrank/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace xrank {

RelevanceTable::RelevanceTable(std::vector<std::string> qids, std::vector<std::string> uids,
                               Eigen::MatrixXd scores)
    : qids_(std::move(qids)), uids_(std::move(uids)), scores_(std::move(scores)) {
  if (scores_.rows() != static_cast<Eigen::Index>(qids_.size()) ||
      scores_.cols() != static_cast<Eigen::Index>(uids_.size())) {
    throw ContentError("relevance table shape does not match its labels");
  }
  if (!scores_.allFinite()) throw ContentError("relevance table contains non-finite scores");
  for (std::size_t i = 0; i < qids_.size(); ++i) {
    if (!qid_index_.emplace(qids_[i], static_cast<Eigen::Index>(i)).second)
      throw ContentError("duplicate qid '" + qids_[i] + "' in relevance table");
  }
  for (std::size_t j = 0; j < uids_.size(); ++j) {
    if (!uid_index_.emplace(uids_[j], static_cast<Eigen::Index>(j)).second)
      throw ContentError("duplicate uid '" + uids_[j] + "' in relevance table");
  }
}

bool RelevanceTable::has_question(std::string_view qid) const {
  return qid_index_.contains(std::string(qid));
}

Eigen::Index RelevanceTable::row_of(std::string_view qid) const {
  const auto it = qid_index_.find(std::string(qid));
  if (it == qid_index_.end()) throw ContentError("no scores for question '" + std::string(qid) + "'");
  return it->second;
}

Eigen::Index RelevanceTable::col_of(std::string_view uid) const {
  const auto it = uid_index_.find(std::string(uid));
  if (it == uid_index_.end()) throw ContentError("no scores for fact '" + std::string(uid) + "'");
  return it->second;
}

double RelevanceTable::score(std::string_view qid, std::string_view uid) const {
  return scores_(row_of(qid), col_of(uid));
}

std::vector<std::string> Ranking::uids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.uid);
  return out;
}

double overlap_score(std::string_view qa, std::string_view fact_text) {
  const auto qa_tokens = tokenize(qa, true);
  const auto fact_tokens = tokenize(fact_text, true);
  const std::set<std::string> q(qa_tokens.begin(), qa_tokens.end());
  const std::set<std::string> f(fact_tokens.begin(), fact_tokens.end());
  if (q.empty() || f.empty()) return 0.0;
  std::size_t shared = 0;
  for (const auto& t : f) shared += q.count(t);
  return static_cast<double>(shared) / static_cast<double>(f.size());
}

RelevanceTable score_lexical(const Corpus& corpus, const VectorProvider& provider,
                             LexicalMethod method, unsigned jobs) {
  const auto& facts = corpus.facts().facts();
  const auto& questions = corpus.questions();
  std::vector<std::string> qids;
  std::vector<std::string> uids;
  for (const auto& q : questions) qids.push_back(q.qid);
  for (const auto& f : facts) uids.push_back(f.uid);

  Eigen::MatrixXd scores(static_cast<Eigen::Index>(qids.size()),
                         static_cast<Eigen::Index>(uids.size()));
  if (method == LexicalMethod::kTfidfCosine) {
    const FactVectors vectors(corpus.facts(), provider, jobs);
    parallel_for(questions.size(), jobs, [&](std::size_t i) {
      const auto qa_vec = provider.vectorize(qa_text(questions[i]));
      for (std::size_t j = 0; j < facts.size(); ++j) {
        scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            cosine(qa_vec, vectors.vectors()[j]);
      }
    });
  } else {
    parallel_for(questions.size(), jobs, [&](std::size_t i) {
      const auto qa = qa_text(questions[i]);
      for (std::size_t j = 0; j < facts.size(); ++j) {
        scores(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            overlap_score(qa, facts[j].text);
      }
    });
  }
  return RelevanceTable(std::move(qids), std::move(uids), std::move(scores));
}

RelevanceTable load_scores(const std::filesystem::path& path, const FactTable& facts,
                           Diagnostics* diag) {
  const auto lines = tsv::read_lines(path);
  std::vector<std::string> uids;
  std::unordered_map<std::string, Eigen::Index> uid_col;
  for (const auto& f : facts) {
    uid_col.emplace(f.uid, static_cast<Eigen::Index>(uids.size()));
    uids.push_back(f.uid);
  }
  const auto n_facts = static_cast<Eigen::Index>(uids.size());

  std::vector<std::string> qids;
  std::unordered_map<std::string, std::size_t> qid_row;
  // NaN marks "not supplied"
  std::vector<Eigen::VectorXd> rows;
  std::set<std::string> unknown;
  std::size_t duplicates = 0;

  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const auto cells = tsv::split(lines[ln]);
    if (ln == 0 && cells.size() == 3 && cells[0] == "qid" && cells[2] == "score") continue;
    const std::string where = path.string() + ":" + std::to_string(ln + 1);
    if (cells.size() != 3) throw FormatError(where + ": expected 3 tab-separated fields");
    double value = 0;
    if (!parse_double(cells[2], value) || !std::isfinite(value)) {
      throw FormatError(where + ": unparseable score '" + cells[2] + "'");
    }
    const auto col = uid_col.find(cells[1]);
    if (col == uid_col.end()) {
      unknown.insert(cells[1]);
      continue;
    }
    auto [it, inserted] = qid_row.emplace(cells[0], rows.size());
    if (inserted) {
      qids.push_back(cells[0]);
      rows.emplace_back(Eigen::VectorXd::Constant(n_facts, std::nan("")));
    }
    auto& slot = rows[it->second][col->second];
    if (!std::isnan(slot)) ++duplicates;
    slot = value;
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw ContentError(path.string() + ": unknown fact uids: " + list);
  }
  if (duplicates > 0) {
    warn(diag, path.string() + ": " + std::to_string(duplicates) +
                   " duplicate (qid, fact) pairs; last value kept");
  }

  Eigen::MatrixXd scores(static_cast<Eigen::Index>(qids.size()), n_facts);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    const auto missing = row.array().isNaN().count();
    if (missing > 0) {
      const double floor = row.array().isNaN().select(INFINITY, row.array()).minCoeff() - 1.0;
      row = row.array().isNaN().select(floor, row.array());
      warn(diag, "question " + qids[i] + ": " + std::to_string(missing) +
                     " facts without scores ranked last");
    }
    scores.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return RelevanceTable(std::move(qids), std::move(uids), std::move(scores));
}

void write_scores(const RelevanceTable& table, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "qid\tfact_uid\tscore\n";
  for (std::size_t i = 0; i < table.qids().size(); ++i) {
    for (std::size_t j = 0; j < table.uids().size(); ++j) {
      out << table.qids()[i] << '\t' << table.uids()[j] << '\t'
          << format_double(table.scores()(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j)))
          << '\n';
    }
  }
  tsv::write_file(path, out.str());
}

Ranking initial_ranking(const RelevanceTable& table, std::string_view qid) {
  const auto row = table.row(qid);
  const auto& uids = table.uids();
  std::vector<std::size_t> order(uids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = row(static_cast<Eigen::Index>(a));
    const double sb = row(static_cast<Eigen::Index>(b));
    if (sa != sb) return sa > sb;
    return uids[a] < uids[b];
  });
  Ranking ranking{std::string(qid), {}};
  ranking.entries.reserve(order.size());
  for (auto j : order) ranking.entries.push_back({uids[j], row(static_cast<Eigen::Index>(j))});
  return ranking;
}

RelevanceTable normalize(const RelevanceTable& table) {
  Eigen::MatrixXd out = table.scores();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    if (row.size() == 0) continue;
    const double lo = row.minCoeff();
    const double hi = row.maxCoeff();
    if (hi == lo) {
      row.setOnes();
    } else {
      row = (kNormalizeFloor + (1.0 - kNormalizeFloor) * ((row.array() - lo) / (hi - lo))).matrix();
    }
  }
  return RelevanceTable(table.qids(), table.uids(), std::move(out));
}

}  // namespace xrank
