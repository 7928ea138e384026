#include "xrank/dataprep.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace xrank {

std::string_view task_name(Task task) {
  return task == Task::kClassification ? "classification" : "regression";
}

void PrepConfig::check() const {
  if (k < 1) throw ContentError("k must be >= 1");
  if (m < 1) throw ContentError("m must be >= 1");
}

double regression_target(const Role& role, double other_role_target) {
  switch (role.kind) {
    case RoleKind::kCentral: return 6.0;
    case RoleKind::kGrounding: return 5.0;
    case RoleKind::kLexGlue: return 4.0;
    default: return other_role_target;
  }
}

std::vector<std::string> sample_negatives(const Question& question, std::string_view gold_uid,
                                          const Corpus& corpus, const FactVectors& vectors,
                                          int k, Diagnostics* diag) {
  const auto* gold_fact = corpus.facts().find(gold_uid);
  if (gold_fact == nullptr) {
    throw ContentError("question " + question.qid + ": gold uid '" + std::string(gold_uid) +
                       "' not in corpus");
  }
  std::unordered_set<std::string_view> gold_set;
  for (const auto& g : question.gold) gold_set.insert(g.uid);

  const auto& anchor = vectors.at(gold_uid);
  struct Candidate {
    double sim;
    const std::string* uid;
  };
  std::vector<Candidate> pool;
  pool.reserve(corpus.facts().size());
  for (const auto& f : corpus.facts()) {
    if (gold_set.contains(f.uid)) continue;
    pool.push_back({cosine(anchor, vectors.at(f.uid)), &f.uid});
  }
  const auto wanted = static_cast<std::size_t>(std::max(k, 0));
  if (pool.size() < wanted) {
    warn(diag, "question " + question.qid + ": only " + std::to_string(pool.size()) +
                   " non-gold facts available for " + std::to_string(wanted) + " negatives");
  }
  const auto take = std::min(wanted, pool.size());
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(),
                    [](const Candidate& a, const Candidate& b) {
                      if (a.sim != b.sim) return a.sim > b.sim;
                      return *a.uid < *b.uid;
                    });
  std::vector<std::string> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(*pool[i].uid);
  return out;
}

std::uint64_t question_seed(std::uint64_t seed, std::string_view qid) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : qid) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer over the combined value
  std::uint64_t z = h ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// Unbiased draw in [0, bound). std::uniform_int_distribution is not
// portable across standard libraries; mt19937_64 output is.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
  const std::uint64_t b = bound;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % b);
}

// C(n, r) saturating at `cap`.
std::size_t choose_capped(std::size_t n, std::size_t r, std::size_t cap) {
  r = std::min(r, n - r);
  long double c = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    c = c * static_cast<long double>(n - r + i) / static_cast<long double>(i);
    if (c > static_cast<long double>(cap)) return cap + 1;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

// Up to m distinct size-r subsets of {0..n-1}, each sorted ascending.
std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t r, std::size_t m,
                                                     std::mt19937_64& rng) {
  std::vector<std::vector<std::size_t>> out;
  if (choose_capped(n, r, m) <= m) {
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(r), true);
    do {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < n; ++i)
        if (mask[i]) subset.push_back(i);
      out.push_back(std::move(subset));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
  }
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> idx(n);
  while (out.size() < m) {
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < r; ++i) {
      std::swap(idx[i], idx[i + draw_below(rng, n - i)]);
    }
    std::vector<std::size_t> subset(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(r));
    std::sort(subset.begin(), subset.end());
    if (seen.insert(subset).second) out.push_back(std::move(subset));
  }
  return out;
}

struct QuestionOutput {
  std::vector<TrainingExample> examples;
  Diagnostics diag;
};

QuestionOutput build_for_question(const Question& q, const Corpus& corpus,
                                  const FactVectors& vectors, const PrepConfig& cfg) {
  QuestionOutput out;
  const std::string question_text = qa_text(q);

  std::vector<const GoldFact*> gold;
  for (const auto& g : q.gold) {
    if (corpus.facts().contains(g.uid)) {
      gold.push_back(&g);
    } else {
      out.diag.warn("question " + q.qid + ": dangling gold uid '" + g.uid + "' skipped");
    }
  }

  std::unordered_map<std::string, std::vector<std::string>> negatives;
  auto negatives_for = [&](const std::string& uid) -> const std::vector<std::string>& {
    auto it = negatives.find(uid);
    if (it == negatives.end()) {
      it = negatives.emplace(uid, sample_negatives(q, uid, corpus, vectors, cfg.k, &out.diag))
               .first;
    }
    return it->second;
  };

  auto positive_value = [&](const GoldFact& g) {
    if (cfg.task == Task::kClassification) return 1.0;
    if (g.role.kind != RoleKind::kCentral && g.role.kind != RoleKind::kGrounding &&
        g.role.kind != RoleKind::kLexGlue) {
      out.diag.warn("question " + q.qid + ": role " + g.role.name() + " of '" + g.uid +
                    "' mapped to target " + format_double(cfg.other_role_target));
    }
    return regression_target(g.role, cfg.other_role_target);
  };

  auto emit = [&](const GoldFact& g, const std::vector<std::string>& context) {
    const auto& negs = negatives_for(g.uid);
    // positives are repeated once per available negative so classes stay balanced
    const double value = positive_value(g);
    const auto& text = corpus.facts().find(g.uid)->text;
    for (std::size_t i = 0; i < negs.size(); ++i) {
      out.examples.push_back({q.qid, question_text, context, text, value, g.role});
    }
    for (const auto& uid : negs) {
      out.examples.push_back(
          {q.qid, question_text, context, corpus.facts().find(uid)->text, 0.0, std::nullopt});
    }
  };

  if (!cfg.with_context) {
    for (const auto* g : gold) emit(*g, {});
    return out;
  }

  if (gold.size() < 2) {
    out.diag.warn("question " + q.qid + ": fewer than 2 gold facts, no context examples");
    return out;
  }
  std::mt19937_64 rng(question_seed(cfg.seed, q.qid));
  const std::size_t max_size = std::min(gold.size() - 1, kMaxContextSize);
  for (std::size_t n = 1; n <= max_size; ++n) {
    for (const auto& subset : sample_subsets(gold.size(), n, static_cast<std::size_t>(cfg.m), rng)) {
      std::vector<std::string> context;
      std::vector<bool> in_context(gold.size(), false);
      for (auto i : subset) {
        in_context[i] = true;
        context.push_back(corpus.facts().find(gold[i]->uid)->text);
      }
      for (std::size_t i = 0; i < gold.size(); ++i) {
        if (!in_context[i]) emit(*gold[i], context);
      }
    }
  }
  return out;
}

std::string sanitize_field(std::string_view field, const char* what, const std::string& qid,
                           Diagnostics* diag) {
  std::string s(field);
  bool changed = false;
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') {
      c = ' ';
      changed = true;
    }
  }
  if (changed) warn(diag, "question " + qid + ": tab/newline in " + what + " replaced by space");
  return s;
}

const char* const kDatasetHeader =
    "qid\tquestion_text\tcontext\tcandidate_text\tlabel_or_target\trole";

}  // namespace

std::vector<TrainingExample> build_dataset(const Corpus& corpus, const FactVectors& vectors,
                                           const PrepConfig& cfg, Diagnostics* diag) {
  cfg.check();
  std::vector<const Question*> annotated;
  for (const auto& q : corpus.questions()) {
    if (q.annotated()) annotated.push_back(&q);
  }
  std::vector<QuestionOutput> parts(annotated.size());
  parallel_for(annotated.size(), cfg.jobs, [&](std::size_t i) {
    parts[i] = build_for_question(*annotated[i], corpus, vectors, cfg);
  });
  std::vector<TrainingExample> all;
  for (auto& part : parts) {
    for (auto& w : part.diag.warnings) warn(diag, std::move(w));
    std::move(part.examples.begin(), part.examples.end(), std::back_inserter(all));
  }
  return all;
}

void write_dataset(const std::vector<TrainingExample>& examples,
                   const std::filesystem::path& path, Diagnostics* diag) {
  std::ostringstream out;
  out << kDatasetHeader << '\n';
  for (const auto& ex : examples) {
    std::string context;
    for (std::size_t i = 0; i < ex.context.size(); ++i) {
      if (i > 0) context += kContextSeparator;
      context += ex.context[i];
    }
    out << sanitize_field(ex.qid, "qid", ex.qid, diag) << '\t'
        << sanitize_field(ex.question_text, "question text", ex.qid, diag) << '\t'
        << sanitize_field(context, "context", ex.qid, diag) << '\t'
        << sanitize_field(ex.candidate_text, "candidate text", ex.qid, diag) << '\t'
        << format_double(ex.value) << '\t' << (ex.role ? ex.role->name() : "NONE") << '\n';
  }
  tsv::write_file(path, out.str());
}

std::vector<TrainingExample> read_dataset(const std::filesystem::path& path) {
  const auto lines = tsv::read_lines(path);
  if (lines.empty() || lines.front() != kDatasetHeader) {
    throw FormatError(path.string() + ": missing dataset header");
  }
  std::vector<TrainingExample> examples;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    if (lines[ln].empty()) continue;
    const auto cells = tsv::split(lines[ln]);
    if (cells.size() != 6) {
      throw FormatError(path.string() + ":" + std::to_string(ln + 1) + ": expected 6 fields");
    }
    TrainingExample ex;
    ex.qid = cells[0];
    ex.question_text = cells[1];
    if (!cells[2].empty()) {
      std::string_view rest = cells[2];
      while (true) {
        const auto pos = rest.find(kContextSeparator);
        ex.context.emplace_back(rest.substr(0, pos));
        if (pos == std::string_view::npos) break;
        rest.remove_prefix(pos + kContextSeparator.size());
      }
    }
    ex.candidate_text = cells[3];
    if (!parse_double(cells[4], ex.value)) {
      throw FormatError(path.string() + ":" + std::to_string(ln + 1) + ": bad value '" +
                        cells[4] + "'");
    }
    if (cells[5] != "NONE") ex.role = Role::parse(cells[5]);
    examples.push_back(std::move(ex));
  }
  return examples;
}

double DatasetStats::balance() const {
  return negatives == 0 ? 0.0
                        : static_cast<double>(positives) / static_cast<double>(negatives);
}

std::string DatasetStats::to_text() const {
  std::ostringstream out;
  out << "total\t" << total << '\n'
      << "positives\t" << positives << '\n'
      << "negatives\t" << negatives << '\n'
      << "balance\t" << format_double(balance()) << '\n'
      << "questions\t" << by_question.size() << '\n';
  for (const auto& [v, n] : by_value) out << "value." << format_double(v) << '\t' << n << '\n';
  for (const auto& [r, n] : by_role) out << "role." << r << '\t' << n << '\n';
  return out.str();
}

DatasetStats dataset_stats(const std::vector<TrainingExample>& examples) {
  DatasetStats s;
  for (const auto& ex : examples) {
    ++s.total;
    (ex.positive() ? s.positives : s.negatives)++;
    ++s.by_value[ex.value];
    ++s.by_role[ex.role ? ex.role->name() : "NONE"];
    ++s.by_question[ex.qid];
  }
  return s;
}

}  // namespace xrank
