#include "xrank/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

namespace xrank {

Role Role::parse(std::string_view label) {
  std::string key;
  for (char c : to_upper(label)) {
    if (c != ' ' && c != '_') key.push_back(c);
  }
  if (key == "CENTRAL") return central();
  if (key == "GROUNDING") return grounding();
  if (key == "LEXGLUE" || key == "LEXICALGLUE") return lexglue();
  if (key == "BACKGROUND") return background();
  if (key == "NEG") return neg();
  return other(std::string(label));
}

std::string Role::name() const {
  switch (kind) {
    case RoleKind::kCentral: return "CENTRAL";
    case RoleKind::kGrounding: return "GROUNDING";
    case RoleKind::kLexGlue: return "LEXGLUE";
    case RoleKind::kBackground: return "BACKGROUND";
    case RoleKind::kNeg: return "NEG";
    case RoleKind::kOther: return label;
  }
  return label;
}

const std::string& answer_text(const Question& q) {
  const auto it = q.choices.find(q.answer_key);
  if (it == q.choices.end()) {
    throw ContentError("question " + q.qid + ": answer key '" + q.answer_key +
                       "' not among choices");
  }
  return it->second;
}

void FactTable::add(ExplanationFact fact) {
  if (const auto* existing = find(fact.uid)) {
    throw FormatError("duplicate fact uid '" + fact.uid + "' in tables '" +
                      existing->table_name + "' and '" + fact.table_name + "'");
  }
  index_.emplace(fact.uid, facts_.size());
  facts_.push_back(std::move(fact));
}

const ExplanationFact* FactTable::find(std::string_view uid) const {
  const auto it = index_.find(std::string(uid));
  return it == index_.end() ? nullptr : &facts_[it->second];
}

Corpus::Corpus(FactTable facts, std::vector<Question> questions)
    : facts_(std::move(facts)), questions_(std::move(questions)) {
  for (std::size_t i = 0; i < questions_.size(); ++i) {
    question_index_.emplace(questions_[i].qid, i);  // first occurrence wins
  }
}

const Question* Corpus::find_question(std::string_view qid) const {
  const auto it = question_index_.find(std::string(qid));
  return it == question_index_.end() ? nullptr : &questions_[it->second];
}

FactTable load_facts(const std::vector<std::filesystem::path>& paths,
                     Diagnostics* diag) {
  FactTable table;
  for (const auto& path : paths) {
    const auto lines = tsv::read_lines(path);
    if (lines.empty()) throw FormatError(path.string() + ": empty table file");
    const auto header = tsv::split(lines.front());
    std::vector<std::size_t> uid_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c].find("UID") != std::string::npos) uid_cols.push_back(c);
    }
    if (uid_cols.size() != 1) {
      throw FormatError(path.string() + ": expected exactly one UID column, found " +
                        std::to_string(uid_cols.size()));
    }
    const std::size_t uid_col = uid_cols.front();
    const std::string table_name = path.stem().string();

    for (std::size_t row = 1; row < lines.size(); ++row) {
      if (trim(lines[row]).empty()) continue;
      const auto cells = tsv::split(lines[row]);
      const std::string uid = uid_col < cells.size() ? trim(cells[uid_col]) : "";
      if (uid.empty()) {
        warn(diag, path.string() + ":" + std::to_string(row + 1) + ": row without uid skipped");
        continue;
      }
      std::string text;
      for (std::size_t c = 0; c < cells.size() && c < header.size(); ++c) {
        if (c == uid_col || header[c].find("SKIP") != std::string::npos) continue;
        const auto cell = normalize_space(cells[c]);
        if (cell.empty()) continue;
        if (!text.empty()) text.push_back(' ');
        text += cell;
      }
      if (text.empty()) {
        warn(diag, path.string() + ":" + std::to_string(row + 1) + ": fact '" + uid +
                       "' has empty text, skipped");
        continue;
      }
      table.add({uid, std::move(text), table_name});
    }
  }
  return table;
}

bool split_choices(std::string_view text, std::string& stem,
                   std::map<std::string, std::string>& choices) {
  choices.clear();
  std::vector<std::pair<char, std::size_t>> markers;
  std::size_t from = 0;
  for (char letter = 'A'; letter <= 'E'; ++letter) {
    const std::string marker = std::string("(") + letter + ")";
    const auto pos = text.find(marker, from);
    if (pos == std::string_view::npos) break;
    markers.emplace_back(letter, pos);
    from = pos + marker.size();
  }
  if (markers.empty()) {
    stem = normalize_space(text);
    return false;
  }
  std::map<std::string, std::string> parsed;
  for (std::size_t i = 0; i < markers.size(); ++i) {
    const auto begin = markers[i].second + 3;
    const auto end = i + 1 < markers.size() ? markers[i + 1].second : text.size();
    auto choice = normalize_space(text.substr(begin, end - begin));
    if (choice.empty()) {
      stem = normalize_space(text);
      return false;
    }
    parsed.emplace(std::string(1, markers[i].first), std::move(choice));
  }
  stem = normalize_space(text.substr(0, markers.front().second));
  choices = std::move(parsed);
  return true;
}

std::vector<GoldFact> parse_explanation(std::string_view cell) {
  std::vector<GoldFact> gold;
  std::istringstream in{std::string(cell)};
  std::string token;
  while (in >> token) {
    const auto bar = token.find('|');
    if (bar == std::string::npos || bar == 0) {
      throw FormatError("malformed explanation token '" + token + "' (expected uid|ROLE)");
    }
    gold.push_back({token.substr(0, bar), Role::parse(token.substr(bar + 1))});
  }
  return gold;
}

std::string format_explanation(const std::vector<GoldFact>& gold) {
  std::string out;
  for (const auto& g : gold) {
    if (!out.empty()) out.push_back(' ');
    out += g.uid + "|" + g.role.name();
  }
  return out;
}

namespace {

std::size_t column_of(const std::vector<std::string>& header, const std::string& name,
                      const std::filesystem::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw FormatError(path.string() + ": missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

std::string cell_at(const std::vector<std::string>& cells, std::size_t c) {
  return c < cells.size() ? trim(cells[c]) : std::string();
}

}  // namespace

QuestionFile load_questions(const std::filesystem::path& path,
                            const QuestionColumns& columns) {
  const auto lines = tsv::read_lines(path);
  if (lines.empty()) throw FormatError(path.string() + ": empty question file");
  const auto header = tsv::split(lines.front());
  const auto qid_col = column_of(header, columns.qid, path);
  const auto text_col = column_of(header, columns.text, path);
  const auto answer_col = column_of(header, columns.answer, path);
  const auto expl_col = column_of(header, columns.explanation, path);

  QuestionFile result;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    if (trim(lines[row]).empty()) continue;
    const auto cells = tsv::split(lines[row]);
    Question q;
    q.qid = cell_at(cells, qid_col);
    q.answer_key = cell_at(cells, answer_col);
    if (!split_choices(cell_at(cells, text_col), q.stem, q.choices)) {
      result.report.issues.push_back({Severity::kWarning, IssueKind::kMalformedChoices, q.qid,
                                      "no well-formed (A)..(E) markers; whole text kept as stem"});
    }
    try {
      q.gold = parse_explanation(cell_at(cells, expl_col));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(row + 1) + ": " + e.what());
    }
    if (!q.choices.contains(q.answer_key)) {
      result.report.issues.push_back({Severity::kError, IssueKind::kAnswerKey, q.qid,
                                      "answer key '" + q.answer_key + "' not among choices"});
      continue;
    }
    result.questions.push_back(std::move(q));
  }
  return result;
}

void write_questions(const std::vector<Question>& questions,
                     const std::filesystem::path& path, const QuestionColumns& columns) {
  std::ostringstream out;
  out << columns.qid << '\t' << columns.text << '\t' << columns.answer << '\t'
      << columns.explanation << '\n';
  for (const auto& q : questions) {
    std::string text = q.stem;
    for (const auto& [key, choice] : q.choices) {
      if (!text.empty()) text.push_back(' ');
      text += "(" + key + ") " + choice;
    }
    out << q.qid << '\t' << text << '\t' << q.answer_key << '\t'
        << format_explanation(q.gold) << '\n';
  }
  tsv::write_file(path, out.str());
}

bool ValidationReport::has_errors() const {
  return std::any_of(issues.begin(), issues.end(),
                     [](const Issue& i) { return i.severity == Severity::kError; });
}

std::size_t ValidationReport::count(IssueKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [kind](const Issue& i) { return i.kind == kind; }));
}

void ValidationReport::append(const ValidationReport& other) {
  issues.insert(issues.end(), other.issues.begin(), other.issues.end());
}

std::string_view issue_kind_name(IssueKind kind) {
  switch (kind) {
    case IssueKind::kDanglingGold: return "dangling";
    case IssueKind::kDuplicateQid: return "duplicate-qid";
    case IssueKind::kDuplicateGold: return "duplicate-gold";
    case IssueKind::kEmptyGold: return "empty-gold";
    case IssueKind::kGoldSize: return "gold-size";
    case IssueKind::kAnswerKey: return "answer-key";
    case IssueKind::kMalformedChoices: return "malformed-choices";
  }
  return "unknown";
}

std::string ValidationReport::to_text() const {
  std::ostringstream out;
  for (const auto& i : issues) {
    out << (i.severity == Severity::kError ? "error" : "warning") << '\t'
        << issue_kind_name(i.kind) << '\t' << i.qid << '\t' << i.detail << '\n';
  }
  return out.str();
}

ValidationReport validate(const Corpus& corpus) {
  ValidationReport report;
  std::unordered_set<std::string> seen_qids;
  for (const auto& q : corpus.questions()) {
    if (!seen_qids.insert(q.qid).second) {
      report.issues.push_back({Severity::kError, IssueKind::kDuplicateQid, q.qid, q.qid});
    }
    if (q.gold.empty()) {
      report.issues.push_back({Severity::kWarning, IssueKind::kEmptyGold, q.qid, ""});
      continue;
    }
    if (q.gold.size() > kMaxGoldSize) {
      report.issues.push_back({Severity::kWarning, IssueKind::kGoldSize, q.qid,
                               std::to_string(q.gold.size()) + " gold facts"});
    }
    std::set<std::string> seen_gold;
    for (const auto& g : q.gold) {
      if (!corpus.facts().contains(g.uid)) {
        report.issues.push_back({Severity::kError, IssueKind::kDanglingGold, q.qid, g.uid});
      }
      if (!seen_gold.insert(g.uid).second) {
        report.issues.push_back({Severity::kWarning, IssueKind::kDuplicateGold, q.qid, g.uid});
      }
    }
  }
  return report;
}

}  // namespace xrank
