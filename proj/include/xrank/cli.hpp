#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xrank/corpus.hpp"
#include "xrank/dataprep.hpp"
#include "xrank/rerank.hpp"

namespace xrank::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kContentFailure = 1;
inline constexpr int kIoFailure = 2;

struct RunConfig {
  std::vector<std::filesystem::path> facts;
  std::filesystem::path questions;
  std::optional<std::filesystem::path> scores;
  std::optional<std::filesystem::path> vectors;
  std::optional<std::filesystem::path> predictions;
  std::filesystem::path out = "out";
  QuestionColumns columns;

  std::string method = "tfidf";  // tfidf | overlap | external
  std::string task = "all";      // classification | regression | all
  bool with_context = false;
  PrepConfig prep;
  RerankConfig rerank;
  std::optional<std::size_t> top_m;
  std::vector<int> sweep;
  bool trace = false;
  unsigned jobs = 1;
};

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_prepare(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_rerank(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Parses argv (subcommand first) and runs it. Exceptions map to exit codes:
// format and I/O problems 2, content problems 1.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xrank::cli
