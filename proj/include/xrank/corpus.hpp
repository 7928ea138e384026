#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "xrank/common.hpp"

namespace xrank {

struct ExplanationFact {
  std::string uid;
  std::string text;
  std::string table_name;

  bool operator==(const ExplanationFact&) const = default;
};

enum class RoleKind { kCentral, kGrounding, kLexGlue, kBackground, kNeg, kOther };

// Explanation role of a gold fact. `label` is only meaningful for kOther and
// keeps the original annotation text.
struct Role {
  RoleKind kind = RoleKind::kOther;
  std::string label;

  static Role central() { return {RoleKind::kCentral, {}}; }
  static Role grounding() { return {RoleKind::kGrounding, {}}; }
  static Role lexglue() { return {RoleKind::kLexGlue, {}}; }
  static Role background() { return {RoleKind::kBackground, {}}; }
  static Role neg() { return {RoleKind::kNeg, {}}; }
  static Role other(std::string label) { return {RoleKind::kOther, std::move(label)}; }

  // Case-insensitive; spaces and underscores are ignored, so "LEXICAL GLUE"
  // and "lex_glue" both parse as kLexGlue. Never fails.
  static Role parse(std::string_view label);

  std::string name() const;

  auto operator<=>(const Role&) const = default;
};

struct GoldFact {
  std::string uid;
  Role role;

  bool operator==(const GoldFact&) const = default;
};

struct Question {
  std::string qid;
  std::string stem;
  std::map<std::string, std::string> choices;
  std::string answer_key;
  std::vector<GoldFact> gold;

  bool annotated() const { return !gold.empty(); }
  bool operator==(const Question&) const = default;
};

// Returns the text of the correct choice. Throws ContentError when the key
// does not resolve.
const std::string& answer_text(const Question& q);

// uid -> fact, in load order.
class FactTable {
 public:
  // Throws FormatError on a duplicate uid.
  void add(ExplanationFact fact);

  const ExplanationFact* find(std::string_view uid) const;
  bool contains(std::string_view uid) const { return find(uid) != nullptr; }

  const std::vector<ExplanationFact>& facts() const { return facts_; }
  std::size_t size() const { return facts_.size(); }
  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }

 private:
  std::vector<ExplanationFact> facts_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class Severity { kWarning, kError };

enum class IssueKind {
  kDanglingGold,
  kDuplicateQid,
  kDuplicateGold,
  kEmptyGold,
  kGoldSize,
  kAnswerKey,
  kMalformedChoices,
};

struct Issue {
  Severity severity;
  IssueKind kind;
  std::string qid;
  std::string detail;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool has_errors() const;
  std::size_t count(IssueKind kind) const;
  void append(const ValidationReport& other);
  std::string to_text() const;
};

std::string_view issue_kind_name(IssueKind kind);

inline constexpr std::size_t kMaxGoldSize = 16;

class Corpus {
 public:
  Corpus() = default;
  Corpus(FactTable facts, std::vector<Question> questions);

  const FactTable& facts() const { return facts_; }
  const std::vector<Question>& questions() const { return questions_; }
  const Question* find_question(std::string_view qid) const;

 private:
  FactTable facts_;
  std::vector<Question> questions_;
  std::unordered_map<std::string, std::size_t> question_index_;
};

FactTable load_facts(const std::vector<std::filesystem::path>& paths,
                     Diagnostics* diag = nullptr);

struct QuestionColumns {
  std::string qid = "QuestionID";
  std::string text = "question";
  std::string answer = "AnswerKey";
  std::string explanation = "explanation";
};

struct QuestionFile {
  std::vector<Question> questions;
  // Row-level problems found while loading. Rows whose answer key does not
  // resolve are reported here and left out of `questions`.
  ValidationReport report;
};

QuestionFile load_questions(const std::filesystem::path& path,
                            const QuestionColumns& columns = {});

// Inverse of load_questions for questions whose choice keys are "A".."E".
void write_questions(const std::vector<Question>& questions,
                     const std::filesystem::path& path,
                     const QuestionColumns& columns = {});

// Splits "stem (A) x (B) y" into stem and choices. Returns false (and puts
// the whole text in `stem`) when the markers are malformed.
bool split_choices(std::string_view text, std::string& stem,
                   std::map<std::string, std::string>& choices);

std::vector<GoldFact> parse_explanation(std::string_view cell);
std::string format_explanation(const std::vector<GoldFact>& gold);

ValidationReport validate(const Corpus& corpus);

}  // namespace xrank
