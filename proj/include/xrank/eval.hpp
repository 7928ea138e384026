#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "xrank/corpus.hpp"
#include "xrank/scorer.hpp"

namespace xrank {

// (1/|R|) * sum over ranks p holding a relevant item of precision@p.
// Throws ContentError when `relevant` is empty or not fully ranked.
double average_precision(std::span<const std::string> ranked,
                         const std::unordered_set<std::string>& relevant);

// Mean AP over rankings whose question has gold facts; roles ignored.
double map_overall(std::span<const Ranking> rankings, const Corpus& corpus);

// Per role, AP against the gold facts of that role only; questions without
// the role do not contribute. Roles nobody contributes to are left out and,
// for the five named roles, noted in `diag`.
std::map<Role, double> map_per_role(std::span<const Ranking> rankings, const Corpus& corpus,
                                    Diagnostics* diag = nullptr);

struct LengthBucket {
  std::size_t count = 0;
  double map = 0.0;
};

// Keyed by gold-explanation length; empty buckets are omitted.
std::map<std::size_t, LengthBucket> map_by_length(std::span<const Ranking> rankings,
                                                  const Corpus& corpus);

struct EvalReport {
  double map_overall = 0.0;
  std::map<Role, double> per_role;
  std::map<std::size_t, LengthBucket> per_length;
  std::size_t n_questions = 0;
  std::size_t skipped = 0;  // rankings for questions without gold

  std::string to_table() const;
  std::string to_kv() const;
};

EvalReport evaluate(std::span<const Ranking> rankings, const Corpus& corpus,
                    Diagnostics* diag = nullptr);

// "qid<TAB>fact_uid" lines in ranking order; `top_m` truncates per question.
void write_predictions(std::span<const Ranking> rankings, const std::filesystem::path& path,
                       std::optional<std::size_t> top_m = std::nullopt);

// Rankings in file order. Scores are synthetic (count - position) since the
// file only carries order.
std::vector<Ranking> read_predictions(const std::filesystem::path& path);

}  // namespace xrank
