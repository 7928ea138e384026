#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "support/synthetic.hpp"
#include "xrank/cli.hpp"

namespace fs = std::filesystem;
using namespace xrank;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run xrank_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh(const std::string& name) {
  auto dir = fs::temp_directory_path() / "xrank_tests" / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A small random corpus written to `dir`; returns the common input flags.
std::vector<std::string> corpus_args(const fs::path& dir, std::uint64_t seed = 101) {
  std::mt19937_64 rng(seed);
  const auto corpus = testing::random_corpus(rng, {.questions = 8, .facts = 50});
  testing::write_corpus(corpus, (dir / "in").string());
  return {"--facts", (dir / "in" / "facts.tsv").string(), "--questions",
          (dir / "in" / "questions.tsv").string()};
}

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> more) {
  base.insert(base.end(), more);
  return base;
}

}  // namespace

TEST_CASE("validate") {
  const auto dir = fresh("validate");
  const auto args = corpus_args(dir);

  SUBCASE("clean corpus") {
    CHECK(xrank_run({"validate"}).code == cli::kIoFailure);  // no inputs at all
    std::vector<std::string> a = {"validate"};
    a.insert(a.end(), args.begin(), args.end());
    const auto good = xrank_run(a);
    CHECK(good.code == cli::kOk);
    CHECK(good.out.find("status: OK") != std::string::npos);
  }
  SUBCASE("dangling gold uid") {
    FactTable facts;
    facts.add({"f1", "water is a liquid", "t"});
    const Question q{"q1", "What is water?", {{"A", "a liquid"}, {"B", "a gas"}}, "A",
                     {{"f1", Role::central()}, {"ghost9", Role::grounding()}}};
    testing::write_corpus(Corpus(std::move(facts), {q}), (dir / "bad").string());
    const auto r = xrank_run({"validate", "--facts", (dir / "bad" / "facts.tsv").string(),
                              "--questions", (dir / "bad" / "questions.tsv").string()});
    CHECK(r.code == cli::kContentFailure);
    CHECK(r.out.find("ghost9") != std::string::npos);
  }
  SUBCASE("missing questions file") {
    const auto r = xrank_run({"validate", "--facts", args[1], "--questions",
                              (dir / "nope.tsv").string()});
    CHECK(r.code == cli::kIoFailure);
    CHECK(r.err.find("nope.tsv") != std::string::npos);
  }
  SUBCASE("unknown option") {
    CHECK(xrank_run({"validate", "--bogus"}).code == cli::kIoFailure);
    CHECK(xrank_run({"--help"}).code == cli::kOk);
  }
}

TEST_CASE("prepare") {
  const auto dir = fresh("prepare");
  auto args = corpus_args(dir);
  args.insert(args.begin(), "prepare");

  SUBCASE("single variant") {
    const auto r =
        xrank_run(with(args, {"--task", "classification", "--out", (dir / "one").string()}));
    REQUIRE(r.code == cli::kOk);
    CHECK(fs::exists(dir / "one" / "train_classification.tsv"));
    CHECK_FALSE(fs::exists(dir / "one" / "train_regression.tsv"));
    CHECK(slurp(dir / "one" / "train_classification.stats.txt").find("balance\t1\n") !=
          std::string::npos);
  }
  SUBCASE("all variants") {
    const auto r = xrank_run(with(args, {"--out", (dir / "all").string(), "--jobs", "3"}));
    REQUIRE(r.code == cli::kOk);
    for (const char* name : {"train_classification", "train_classification_context",
                             "train_regression", "train_regression_context"}) {
      CHECK(fs::exists(dir / "all" / (std::string(name) + ".tsv")));
    }
    CHECK(slurp(dir / "all" / "train_regression.stats.txt").find("balance\t1\n") !=
          std::string::npos);
  }
  SUBCASE("seed fixes the output") {
    REQUIRE(xrank_run(with(args, {"--out", (dir / "a").string(), "--task", "regression",
                                  "--with-context"}))
                .code == cli::kOk);
    REQUIRE(xrank_run(with(args, {"--out", (dir / "b").string(), "--task", "regression",
                                  "--with-context", "--jobs", "4"}))
                .code == cli::kOk);
    CHECK(slurp(dir / "a" / "train_regression_context.tsv") ==
          slurp(dir / "b" / "train_regression_context.tsv"));
  }
}

TEST_CASE("rank and rerank") {
  const auto dir = fresh("rank");
  const auto args = corpus_args(dir);
  auto cmd = [&](const std::string& sub, std::initializer_list<std::string> more) {
    std::vector<std::string> a = {sub};
    a.insert(a.end(), args.begin(), args.end());
    a.insert(a.end(), more);
    return xrank_run(a);
  };

  REQUIRE(cmd("rank", {"--out", (dir / "r1").string()}).code == cli::kOk);
  REQUIRE(cmd("rank", {"--out", (dir / "r2").string(), "--jobs", "4"}).code == cli::kOk);
  CHECK(slurp(dir / "r1" / "predictions.tsv") == slurp(dir / "r2" / "predictions.tsv"));
  CHECK(slurp(dir / "r1" / "scores.tsv") == slurp(dir / "r2" / "scores.tsv"));

  SUBCASE("depth 1 reproduces the initial ranking") {
    REQUIRE(cmd("rerank", {"--out", (dir / "r1").string(), "--depth", "1"}).code == cli::kOk);
    CHECK(slurp(dir / "r1" / "predictions.reranked.tsv") ==
          slurp(dir / "r1" / "predictions.tsv"));
  }
  SUBCASE("external scores") {
    // Reverse the tf-idf scores: the first fact of each ranking must change.
    std::ostringstream rev;
    rev << "qid\tfact_uid\tscore\n";
    for (const auto& line : tsv::read_lines(dir / "r1" / "scores.tsv")) {
      const auto f = tsv::split(line);
      if (f[0] == "qid") continue;
      double v = 0;
      REQUIRE(parse_double(f[2], v));
      rev << f[0] << '\t' << f[1] << '\t' << format_double(-v) << '\n';
    }
    tsv::write_file(dir / "rev.tsv", rev.str());
    REQUIRE(cmd("rank", {"--out", (dir / "ext").string(), "--scores", (dir / "rev.tsv").string()})
                .code == cli::kOk);
    CHECK(slurp(dir / "ext" / "predictions.tsv") != slurp(dir / "r1" / "predictions.tsv"));
    const auto scores = tsv::read_lines(dir / "ext" / "scores.tsv");
    CHECK(scores == tsv::read_lines(dir / "rev.tsv"));
  }
  SUBCASE("missing external score is warned about") {
    auto lines = tsv::read_lines(dir / "r1" / "scores.tsv");
    lines.pop_back();
    std::string text;
    for (const auto& l : lines) text += l + "\n";
    tsv::write_file(dir / "short.tsv", text);
    const auto r = cmd("rank", {"--out", (dir / "short").string(), "--scores",
                                (dir / "short.tsv").string()});
    CHECK(r.code == cli::kOk);
    CHECK(r.err.find("warning") != std::string::npos);
  }
  SUBCASE("traces") {
    REQUIRE(cmd("rerank", {"--out", (dir / "t").string(), "--depth", "4", "--trace"}).code ==
            cli::kOk);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(dir / "t" / "traces")) {
      CHECK(e.path().string().ends_with(".trace.txt"));
      ++n;
    }
    CHECK(n == 8);
  }
  SUBCASE("top-m truncates predictions") {
    REQUIRE(cmd("rank", {"--out", (dir / "top").string(), "--top-m", "5"}).code == cli::kOk);
    CHECK(tsv::read_lines(dir / "top" / "predictions.tsv").size() == 40);
  }
}

TEST_CASE("evaluate") {
  const auto dir = fresh("evaluate");
  FactTable facts;
  for (const char* uid : {"a", "b", "c", "d"}) facts.add({uid, std::string("word ") + uid, "t"});
  const Question q1{"q1", "word a?", {{"A", "x"}, {"B", "y"}}, "A",
                    {{"a", Role::central()}, {"b", Role::background()}}};
  const Question q2{"q2", "word c?", {{"A", "x"}, {"B", "y"}}, "B",
                    {{"c", Role::neg()}}};
  testing::write_corpus(Corpus(std::move(facts), {q1, q2}), (dir / "in").string());
  const std::vector<std::string> in = {"--facts", (dir / "in" / "facts.tsv").string(),
                                       "--questions", (dir / "in" / "questions.tsv").string(),
                                       "--out", (dir / "o").string()};

  tsv::write_file(dir / "perfect.tsv",
                  "q1\ta\nq1\tb\nq1\tc\nq1\td\nq2\tc\nq2\ta\nq2\tb\nq2\td\n");
  auto a = with(std::vector<std::string>{"evaluate"}, {"--predictions", (dir / "perfect.tsv").string()});
  a.insert(a.end(), in.begin(), in.end());
  const auto r = xrank_run(a);
  REQUIRE(r.code == cli::kOk);
  const auto kv = slurp(dir / "o" / "eval.kv");
  CHECK(kv.find("map=1\n") != std::string::npos);
  CHECK(r.out.find("BACKGROUND") != std::string::npos);
  CHECK(r.out.find("NEG") != std::string::npos);

  auto s = with(std::vector<std::string>{"evaluate"}, {"--sweep", "1,3"});
  s.insert(s.end(), in.begin(), in.end());
  REQUIRE(xrank_run(s).code == cli::kOk);
  CHECK(tsv::read_lines(dir / "o" / "sweep.tsv").size() == 3);

  auto bad = with(std::vector<std::string>{"evaluate"}, {"--predictions", (dir / "missing.tsv").string()});
  bad.insert(bad.end(), in.begin(), in.end());
  CHECK(xrank_run(bad).code == cli::kIoFailure);
}

TEST_CASE("config file with flag override") {
  const auto dir = fresh("config");
  const auto args = corpus_args(dir);
  tsv::write_file(dir / "run.ini", "facts=" + args[1] + "\nquestions=" + args[3] +
                                       "\nout=" + (dir / "from_config").string() +
                                       "\ndepth=1\n");
  REQUIRE(xrank_run({"rank", "--config", (dir / "run.ini").string()}).code == cli::kOk);
  CHECK(fs::exists(dir / "from_config" / "predictions.tsv"));

  REQUIRE(xrank_run({"rerank", "--config", (dir / "run.ini").string(), "--out",
                     (dir / "flag").string()})
              .code == cli::kOk);
  CHECK(fs::exists(dir / "flag" / "predictions.reranked.tsv"));
  CHECK_FALSE(fs::exists(dir / "from_config" / "predictions.reranked.tsv"));
}

TEST_CASE("stages compose through files") {
  const auto dir = fresh("compose");
  const auto args = corpus_args(dir, 103);
  auto cmd = [&](std::vector<std::string> a) {
    a.insert(a.begin() + 1, args.begin(), args.end());
    a.push_back("--out");
    a.push_back((dir / "o").string());
    return xrank_run(a).code;
  };
  REQUIRE(cmd({"rank"}) == cli::kOk);
  REQUIRE(cmd({"rerank", "--scores", (dir / "o" / "scores.tsv").string()}) == cli::kOk);
  REQUIRE(cmd({"evaluate", "--predictions", (dir / "o" / "predictions.reranked.tsv").string()}) ==
          cli::kOk);
  CHECK(slurp(dir / "o" / "eval.kv").find("\nmap=") != std::string::npos);
}
