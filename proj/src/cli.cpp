#include "xrank/cli.hpp"

#include <CLI11.hpp>
#include <ostream>

#include "xrank/eval.hpp"
#include "xrank/scorer.hpp"
#include "xrank/textsim.hpp"

namespace xrank::cli {

namespace fs = std::filesystem;

namespace {

void require_file(const fs::path& path, const char* what) {
  if (path.empty()) throw IoError(std::string("no ") + what + " given");
  if (!fs::exists(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

void require_inputs(const RunConfig& cfg) {
  if (cfg.facts.empty()) throw IoError("no fact tables given (--facts)");
  for (const auto& f : cfg.facts) require_file(f, "fact table");
  require_file(cfg.questions, "questions file");
  if (cfg.scores) require_file(*cfg.scores, "scores file");
  if (cfg.vectors) require_file(*cfg.vectors, "vector file");
}

void flush(Diagnostics& diag, std::ostream& err) {
  for (const auto& w : diag.warnings) err << "warning: " << w << '\n';
  diag.warnings.clear();
}

struct Loaded {
  Corpus corpus;
  ValidationReport load_report;
};

Loaded load_corpus(const RunConfig& cfg, std::ostream& err) {
  require_inputs(cfg);
  Diagnostics diag;
  auto facts = load_facts(cfg.facts, &diag);
  auto questions = load_questions(cfg.questions, cfg.columns);
  flush(diag, err);
  for (const auto& issue : questions.report.issues) {
    if (issue.severity == Severity::kError) {
      err << "warning: question " << issue.qid << " dropped: " << issue.detail << '\n';
    }
  }
  return {Corpus(std::move(facts), std::move(questions.questions)), std::move(questions.report)};
}

VectorProvider make_provider(const RunConfig& cfg, const Corpus& corpus) {
  if (cfg.vectors) return VectorProvider::load_dense(*cfg.vectors);
  return build_default_provider(corpus);
}

RelevanceTable make_table(const RunConfig& cfg, const Corpus& corpus,
                          const VectorProvider& provider, std::ostream& err) {
  if (cfg.scores || cfg.method == "external") {
    if (!cfg.scores) throw IoError("--method external needs --scores");
    Diagnostics diag;
    auto table = load_scores(*cfg.scores, corpus.facts(), &diag);
    flush(diag, err);
    return table;
  }
  if (cfg.method == "tfidf") {
    return score_lexical(corpus, provider, LexicalMethod::kTfidfCosine, cfg.jobs);
  }
  if (cfg.method == "overlap") {
    return score_lexical(corpus, provider, LexicalMethod::kOverlap, cfg.jobs);
  }
  throw ContentError("unknown method '" + cfg.method + "'");
}

std::vector<Ranking> rank_all(const RelevanceTable& table) {
  std::vector<Ranking> rankings;
  rankings.reserve(table.qids().size());
  for (const auto& qid : table.qids()) rankings.push_back(initial_ranking(table, qid));
  return rankings;
}

void ensure_out(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto loaded = load_corpus(cfg, err);
  auto report = loaded.load_report;
  report.append(validate(loaded.corpus));
  out << "facts: " << loaded.corpus.facts().size()
      << "\nquestions: " << loaded.corpus.questions().size() << '\n';
  out << report.to_text();
  out << (report.has_errors() ? "status: FAIL\n" : "status: OK\n");
  return report.has_errors() ? kContentFailure : kOk;
}

int cmd_prepare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto loaded = load_corpus(cfg, err);
  const auto& corpus = loaded.corpus;
  ensure_out(cfg.out);
  const auto provider = make_provider(cfg, corpus);
  const FactVectors vectors(corpus.facts(), provider, cfg.jobs);

  std::vector<std::pair<Task, bool>> variants;
  if (cfg.task == "all") {
    variants = {{Task::kClassification, false},
                {Task::kClassification, true},
                {Task::kRegression, false},
                {Task::kRegression, true}};
  } else if (cfg.task == "classification") {
    variants = {{Task::kClassification, cfg.with_context}};
  } else if (cfg.task == "regression") {
    variants = {{Task::kRegression, cfg.with_context}};
  } else {
    throw ContentError("unknown task '" + cfg.task + "'");
  }

  for (const auto& [task, with_context] : variants) {
    PrepConfig prep = cfg.prep;
    prep.task = task;
    prep.with_context = with_context;
    prep.jobs = cfg.jobs;
    Diagnostics diag;
    const auto examples = build_dataset(corpus, vectors, prep, &diag);
    const std::string name =
        "train_" + std::string(task_name(task)) + (with_context ? "_context" : "");
    write_dataset(examples, cfg.out / (name + ".tsv"), &diag);
    const auto stats = dataset_stats(examples);
    tsv::write_file(cfg.out / (name + ".stats.txt"), stats.to_text());
    flush(diag, err);
    out << "== " << name << " ==\n" << stats.to_text();
  }
  return kOk;
}

int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto loaded = load_corpus(cfg, err);
  ensure_out(cfg.out);
  const auto provider = make_provider(cfg, loaded.corpus);
  const auto table = make_table(cfg, loaded.corpus, provider, err);
  write_scores(table, cfg.out / "scores.tsv");
  const auto rankings = rank_all(table);
  write_predictions(rankings, cfg.out / "predictions.tsv", cfg.top_m);
  out << "ranked " << rankings.size() << " questions over " << table.uids().size()
      << " facts\n";
  return kOk;
}

int cmd_rerank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.rerank.check();
  auto loaded = load_corpus(cfg, err);
  const auto& corpus = loaded.corpus;
  ensure_out(cfg.out);
  const auto provider = make_provider(cfg, corpus);
  const auto table = make_table(cfg, corpus, provider, err);
  const auto normalized = normalize(table);
  const FactVectors vectors(corpus.facts(), provider, cfg.jobs);
  // Order comes from the raw scores; normalization only feeds the weights.
  const auto initial = rank_all(table);

  std::vector<RerankResult> results(initial.size());
  parallel_for(initial.size(), cfg.jobs, [&](std::size_t i) {
    const auto* q = corpus.find_question(initial[i].qid);
    if (q == nullptr) throw ContentError("scores for unknown question '" + initial[i].qid + "'");
    const auto qa = provider.vectorize(qa_text(*q));
    results[i] = iterative_rerank(initial[i], normalized, vectors, qa, cfg.rerank);
  });

  std::vector<Ranking> reranked;
  reranked.reserve(results.size());
  for (const auto& r : results) reranked.push_back(r.ranking);
  write_predictions(reranked, cfg.out / "predictions.reranked.tsv", cfg.top_m);
  if (cfg.trace) {
    ensure_out(cfg.out / "traces");
    for (const auto& r : results) {
      tsv::write_file(cfg.out / "traces" / (file_safe(r.trace.qid) + ".trace.txt"),
                      r.trace.to_text());
    }
  }
  out << "reranked " << reranked.size() << " questions at depth " << cfg.rerank.depth << '\n';
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  auto loaded = load_corpus(cfg, err);
  const auto& corpus = loaded.corpus;
  ensure_out(cfg.out);

  std::optional<fs::path> predictions = cfg.predictions;
  if (!predictions && cfg.sweep.empty()) predictions = cfg.out / "predictions.tsv";
  if (predictions) {
    require_file(*predictions, "predictions file");
    const auto rankings = read_predictions(*predictions);
    Diagnostics diag;
    const auto report = evaluate(rankings, corpus, &diag);
    flush(diag, err);
    tsv::write_file(cfg.out / "eval.txt", report.to_table());
    tsv::write_file(cfg.out / "eval.kv", report.to_kv());
    out << report.to_table();
  }
  if (!cfg.sweep.empty()) {
    const auto provider = make_provider(cfg, corpus);
    const auto table = make_table(cfg, corpus, provider, err);
    const FactVectors vectors(corpus.facts(), provider, cfg.jobs);
    const auto rows = depth_sweep(rank_all(table), normalize(table), vectors, provider, corpus,
                                  cfg.sweep, cfg.jobs);
    const auto text = sweep_to_text(rows);
    tsv::write_file(cfg.out / "sweep.tsv", text);
    out << (predictions ? "\n" : "") << text;
  }
  return kOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explanation ranking pipeline: prepare, rank, rerank, evaluate"};
  app.set_config("--config", "", "flat key=value configuration file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::vector<std::string> facts;
  std::string questions;
  std::string scores;
  std::string vectors;
  std::string predictions;
  std::string out_dir = cfg.out.string();
  std::size_t top_m = 0;

  app.add_option("--facts", facts, "fact table TSV files")->expected(1, -1);
  app.add_option("--questions", questions, "question TSV file");
  app.add_option("--scores", scores, "external scores TSV (qid, fact_uid, score)");
  app.add_option("--vectors", vectors, "word vector file (word2vec text format)");
  app.add_option("--predictions", predictions, "predictions file to evaluate");
  app.add_option("--method", cfg.method, "relevance scorer")
      ->check(CLI::IsMember({"tfidf", "overlap", "external"}));
  app.add_option("--task", cfg.task, "dataset task")
      ->check(CLI::IsMember({"classification", "regression", "all"}));
  app.add_flag("--with-context", cfg.with_context, "build the with-context dataset variant");
  app.add_option("--depth", cfg.rerank.depth, "re-ranking depth N")->check(CLI::PositiveNumber);
  app.add_option("--k", cfg.prep.k, "negatives per gold fact")->check(CLI::PositiveNumber);
  app.add_option("--m", cfg.prep.m, "context subsets per size")->check(CLI::PositiveNumber);
  app.add_option("--other-role-target", cfg.prep.other_role_target,
                 "regression target for BACKGROUND/NEG/unknown roles");
  app.add_option("--seed", cfg.prep.seed, "random seed");
  app.add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--top-m", top_m, "facts written per question (0 = all)");
  app.add_option("--sweep", cfg.sweep, "depths for a MAP sweep, e.g. 1,3,5")->delimiter(',');
  app.add_flag("--trace", cfg.trace, "write per-question re-ranking traces");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--qid-column", cfg.columns.qid);
  app.add_option("--question-column", cfg.columns.text);
  app.add_option("--answer-column", cfg.columns.answer);
  app.add_option("--explanation-column", cfg.columns.explanation);

  auto* validate_cmd = app.add_subcommand("validate", "check corpus consistency");
  auto* prepare_cmd = app.add_subcommand("prepare", "write relevance-learner training datasets");
  auto* rank_cmd = app.add_subcommand("rank", "score facts and write initial predictions");
  auto* rerank_cmd = app.add_subcommand("rerank", "iteratively re-rank the top N facts");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "MAP reports and depth sweeps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kIoFailure;
  }

  for (const auto& f : facts) cfg.facts.emplace_back(f);
  cfg.questions = questions;
  if (!scores.empty()) cfg.scores = scores;
  if (!vectors.empty()) cfg.vectors = vectors;
  if (!predictions.empty()) cfg.predictions = predictions;
  cfg.out = out_dir;
  if (top_m > 0) cfg.top_m = top_m;

  try {
    if (validate_cmd->parsed()) return cmd_validate(cfg, out, err);
    if (prepare_cmd->parsed()) return cmd_prepare(cfg, out, err);
    if (rank_cmd->parsed()) return cmd_rank(cfg, out, err);
    if (rerank_cmd->parsed()) return cmd_rerank(cfg, out, err);
    if (evaluate_cmd->parsed()) return cmd_evaluate(cfg, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const ContentError& e) {
    err << "error: " << e.what() << '\n';
    return kContentFailure;
  }
  return kIoFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("xrank");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace xrank::cli
