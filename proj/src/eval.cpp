#include "xrank/eval.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace xrank {

double average_precision(std::span<const std::string> ranked,
                         const std::unordered_set<std::string>& relevant) {
  if (relevant.empty()) throw ContentError("average_precision: empty relevant set");
  std::unordered_set<std::string_view> found;
  double sum = 0.0;
  for (std::size_t p = 0; p < ranked.size(); ++p) {
    if (!relevant.contains(ranked[p]) || !found.insert(ranked[p]).second) continue;
    sum += static_cast<double>(found.size()) / static_cast<double>(p + 1);
  }
  if (found.size() != relevant.size()) {
    for (const auto& r : relevant) {
      if (!found.contains(r)) {
        throw ContentError("average_precision: relevant fact '" + r + "' missing from ranking");
      }
    }
  }
  return sum / static_cast<double>(relevant.size());
}

namespace {

struct Evaluated {
  const Ranking* ranking;
  const Question* question;
  std::vector<std::string> uids;
};

// Annotated (ranking, question) pairs in ranking order; counts the rest.
std::vector<Evaluated> pair_up(std::span<const Ranking> rankings, const Corpus& corpus,
                               std::size_t* skipped = nullptr) {
  std::vector<Evaluated> out;
  std::size_t n_skipped = 0;
  for (const auto& r : rankings) {
    const auto* q = corpus.find_question(r.qid);
    if (q == nullptr) throw ContentError("ranking for unknown question '" + r.qid + "'");
    if (!q->annotated()) {
      ++n_skipped;
      continue;
    }
    out.push_back({&r, q, r.uids()});
  }
  if (skipped != nullptr) *skipped = n_skipped;
  return out;
}

std::unordered_set<std::string> gold_set(const Question& q) {
  std::unordered_set<std::string> s;
  for (const auto& g : q.gold) s.insert(g.uid);
  return s;
}

double mean(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

std::vector<double> per_question_ap(const std::vector<Evaluated>& items) {
  std::vector<double> aps;
  aps.reserve(items.size());
  for (const auto& e : items) {
    try {
      aps.push_back(average_precision(e.uids, gold_set(*e.question)));
    } catch (const ContentError& err) {
      throw ContentError("question " + e.question->qid + ": " + err.what());
    }
  }
  return aps;
}

}  // namespace

double map_overall(std::span<const Ranking> rankings, const Corpus& corpus) {
  const auto items = pair_up(rankings, corpus);
  if (items.empty()) throw ContentError("map_overall: no annotated questions to evaluate");
  return mean(per_question_ap(items));
}

std::map<Role, double> map_per_role(std::span<const Ranking> rankings, const Corpus& corpus,
                                    Diagnostics* diag) {
  const auto items = pair_up(rankings, corpus);
  if (items.empty()) throw ContentError("map_per_role: no annotated questions to evaluate");
  std::map<Role, std::vector<double>> aps;
  for (const auto& e : items) {
    std::map<Role, std::unordered_set<std::string>> by_role;
    for (const auto& g : e.question->gold) by_role[g.role].insert(g.uid);
    for (const auto& [role, relevant] : by_role) {
      aps[role].push_back(average_precision(e.uids, relevant));
    }
  }
  std::map<Role, double> out;
  for (const auto& [role, values] : aps) out.emplace(role, mean(values));
  for (const auto& role : {Role::central(), Role::grounding(), Role::lexglue(),
                           Role::background(), Role::neg()}) {
    if (!out.contains(role)) warn(diag, "role " + role.name() + ": no contributing questions");
  }
  return out;
}

std::map<std::size_t, LengthBucket> map_by_length(std::span<const Ranking> rankings,
                                                  const Corpus& corpus) {
  const auto items = pair_up(rankings, corpus);
  const auto aps = per_question_ap(items);
  std::map<std::size_t, std::vector<double>> buckets;
  for (std::size_t i = 0; i < items.size(); ++i) {
    buckets[items[i].question->gold.size()].push_back(aps[i]);
  }
  std::map<std::size_t, LengthBucket> out;
  for (const auto& [len, values] : buckets) out[len] = {values.size(), mean(values)};
  return out;
}

EvalReport evaluate(std::span<const Ranking> rankings, const Corpus& corpus,
                    Diagnostics* diag) {
  EvalReport report;
  const auto items = pair_up(rankings, corpus, &report.skipped);
  report.n_questions = items.size();
  report.map_overall = map_overall(rankings, corpus);
  report.per_role = map_per_role(rankings, corpus, diag);
  report.per_length = map_by_length(rankings, corpus);
  return report;
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  out << "questions evaluated: " << n_questions << " (skipped without gold: " << skipped << ")\n";
  out << "MAP: " << format_double(map_overall) << "\n\n";
  out << "role\tMAP\n";
  for (const auto& [role, map] : per_role) out << role.name() << '\t' << format_double(map) << '\n';
  out << "\ngold_length\tquestions\tMAP\n";
  for (const auto& [len, b] : per_length) {
    out << len << '\t' << b.count << '\t' << format_double(b.map) << '\n';
  }
  return out.str();
}

std::string EvalReport::to_kv() const {
  std::ostringstream out;
  out << "n_questions=" << n_questions << '\n'
      << "skipped=" << skipped << '\n'
      << "map=" << format_double(map_overall) << '\n';
  for (const auto& [role, map] : per_role) {
    out << "role." << role.name() << "=" << format_double(map) << '\n';
  }
  for (const auto& [len, b] : per_length) {
    out << "length." << len << ".count=" << b.count << '\n'
        << "length." << len << ".map=" << format_double(b.map) << '\n';
  }
  return out.str();
}

void write_predictions(std::span<const Ranking> rankings, const std::filesystem::path& path,
                       std::optional<std::size_t> top_m) {
  std::ostringstream out;
  for (const auto& r : rankings) {
    const auto n = top_m ? std::min(*top_m, r.entries.size()) : r.entries.size();
    for (std::size_t i = 0; i < n; ++i) out << r.qid << '\t' << r.entries[i].uid << '\n';
  }
  tsv::write_file(path, out.str());
}

std::vector<Ranking> read_predictions(const std::filesystem::path& path) {
  const auto lines = tsv::read_lines(path);
  std::vector<Ranking> rankings;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const auto cells = tsv::split(lines[ln]);
    if (cells.size() != 2) {
      throw FormatError(path.string() + ":" + std::to_string(ln + 1) +
                        ": expected qid<TAB>fact_uid");
    }
    auto [it, inserted] = index.emplace(cells[0], rankings.size());
    if (inserted) rankings.push_back({cells[0], {}});
    rankings[it->second].entries.push_back({cells[1], 0.0});
  }
  for (auto& r : rankings) {
    const auto n = r.entries.size();
    for (std::size_t i = 0; i < n; ++i) r.entries[i].score = static_cast<double>(n - i);
  }
  return rankings;
}

}  // namespace xrank
