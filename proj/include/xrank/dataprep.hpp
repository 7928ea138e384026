#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xrank/corpus.hpp"
#include "xrank/textsim.hpp"

namespace xrank {

enum class Task { kClassification, kRegression };

std::string_view task_name(Task task);

// One relevance-learner training row. `value` is the 0/1 label for
// classification or the regression target. `role` is empty for negatives.
struct TrainingExample {
  std::string qid;
  std::string question_text;
  std::vector<std::string> context;
  std::string candidate_text;
  double value = 0.0;
  std::optional<Role> role;

  bool positive() const { return value > 0.0; }
  bool operator==(const TrainingExample&) const = default;
};

struct PrepConfig {
  int k = 7;                   // negatives per gold fact, and copies per positive
  int m = 3;                   // context subsets per question per context size
  std::uint64_t seed = 42;
  bool with_context = false;
  Task task = Task::kClassification;
  double other_role_target = 4.0;  // BACKGROUND, NEG and unknown roles
  unsigned jobs = 1;

  void check() const;
};

// Regression target for a gold role: CENTRAL 6, GROUNDING 5, LEXGLUE 4,
// anything else `other_role_target`.
double regression_target(const Role& role, double other_role_target);

inline constexpr std::string_view kContextSeparator = " [SEP] ";
inline constexpr std::size_t kMaxContextSize = 15;

// The k non-gold facts most similar to `gold_uid`, by cosine descending and
// uid ascending on ties. Returns fewer (with a warning) when the corpus runs
// short.
std::vector<std::string> sample_negatives(const Question& question, std::string_view gold_uid,
                                          const Corpus& corpus, const FactVectors& vectors,
                                          int k, Diagnostics* diag = nullptr);

// Per-question RNG seed derived from (seed, qid) so output does not depend
// on scheduling.
std::uint64_t question_seed(std::uint64_t seed, std::string_view qid);

std::vector<TrainingExample> build_dataset(const Corpus& corpus, const FactVectors& vectors,
                                           const PrepConfig& cfg, Diagnostics* diag = nullptr);

void write_dataset(const std::vector<TrainingExample>& examples,
                   const std::filesystem::path& path, Diagnostics* diag = nullptr);
std::vector<TrainingExample> read_dataset(const std::filesystem::path& path);

struct DatasetStats {
  std::size_t total = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::map<double, std::size_t> by_value;
  std::map<std::string, std::size_t> by_role;  // "NONE" for negatives
  std::map<std::string, std::size_t> by_question;

  // positives / negatives; 0 when there are no negatives.
  double balance() const;
  std::string to_text() const;
};

DatasetStats dataset_stats(const std::vector<TrainingExample>& examples);

}  // namespace xrank
