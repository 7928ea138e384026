#include <doctest.h>

#include <filesystem>
#include <random>

#include "support/synthetic.hpp"
#include "xrank/corpus.hpp"

namespace fs = std::filesystem;
using namespace xrank;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / "xrank_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("load_facts joins non-SKIP cells") {
  const auto dir = scratch("facts_join");
  tsv::write_file(dir / "kinds.tsv",
                  "[SKIP] UID\tX\tREL\tY\t[SKIP] COMMENT\n"
                  "x1\tan apple\tis a kind of\tfruit\tignored note\n"
                  "x2\t\twater is a liquid\t\t\n"
                  "x3\t  spaced   out \tcell\t\t\n");
  Diagnostics diag;
  const auto facts = load_facts({dir / "kinds.tsv"}, &diag);
  REQUIRE(facts.size() == 3);
  CHECK(facts.find("x1")->text == "an apple is a kind of fruit");
  CHECK(facts.find("x1")->table_name == "kinds");
  CHECK(facts.find("x2")->text == "water is a liquid");
  CHECK(facts.find("x3")->text == "spaced out cell");
  CHECK(diag.warnings.empty());
}

TEST_CASE("load_facts errors") {
  const auto dir = scratch("facts_errors");
  tsv::write_file(dir / "a.tsv", "UID\tTEXT\nx1\tone\n");
  tsv::write_file(dir / "b.tsv", "UID\tTEXT\nx1\tother\n");
  tsv::write_file(dir / "nouid.tsv", "ID\tTEXT\nx1\tone\n");

  SUBCASE("duplicate uid across files names both tables") {
    try {
      load_facts({dir / "a.tsv", dir / "b.tsv"});
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("x1") != std::string::npos);
      CHECK(msg.find("'a'") != std::string::npos);
      CHECK(msg.find("'b'") != std::string::npos);
    }
  }
  SUBCASE("missing UID column names the file") {
    try {
      load_facts({dir / "nouid.tsv"});
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("nouid.tsv") != std::string::npos);
    }
  }
  SUBCASE("unreadable file") { CHECK_THROWS_AS(load_facts({dir / "missing.tsv"}), IoError); }
}

TEST_CASE("Fact text never has stray spaces") {
  std::mt19937_64 rng(7);
  const char* pieces[] = {"", " ", "  a ", "b", "\tc", "d  e", " "};
  for (int trial = 0; trial < 50; ++trial) {
    std::string row = "u";
    std::string header = "UID";
    for (int c = 0; c < 5; ++c) {
      row += "\t" + std::string(pieces[rng() % 7]);
      header += "\tC" + std::to_string(c);
    }
    const auto dir = scratch("facts_space");
    tsv::write_file(dir / "t.tsv", header + "\n" + row + "\n");
    const auto facts = load_facts({dir / "t.tsv"});
    for (const auto& f : facts) {
      CHECK(f.text == trim(f.text));
      CHECK(f.text.find("  ") == std::string::npos);
      CHECK(!f.text.empty());
    }
  }
}

TEST_CASE("parse_explanation") {
  auto gold = parse_explanation("a|CENTRAL b|LEXGLUE");
  REQUIRE(gold.size() == 2);
  CHECK(gold[0] == GoldFact{"a", Role::central()});
  CHECK(gold[1] == GoldFact{"b", Role::lexglue()});

  CHECK(parse_explanation("a|BACKGROUND").front().role == Role::background());
  CHECK(parse_explanation("a|ROLEX").front().role == Role::other("ROLEX"));
  CHECK(parse_explanation("a|central").front().role == Role::central());
  CHECK(parse_explanation("a|lex_glue").front().role == Role::lexglue());
  CHECK(parse_explanation("a|LEXICALGLUE").front().role == Role::lexglue());
  CHECK(parse_explanation("").empty());
  CHECK_THROWS_AS(parse_explanation("a|CENTRAL nobar"), FormatError);
}

TEST_CASE("Role::parse handles spaced labels") {
  CHECK(Role::parse("LEXICAL GLUE") == Role::lexglue());
  CHECK(Role::parse("Neg") == Role::neg());
  CHECK(Role::parse("ROLEX").name() == "ROLEX");
}

TEST_CASE("parse_explanation preserves order and multiplicity") {
  std::mt19937_64 rng(3);
  const char* labels[] = {"CENTRAL", "GROUNDING", "LEXGLUE", "BACKGROUND", "NEG", "odd"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<GoldFact> expected;
    std::string cell;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      const std::string uid = "u" + std::to_string(rng() % 4);  // repeats on purpose
      const std::string label = labels[rng() % 6];
      expected.push_back({uid, Role::parse(label)});
      cell += (i ? " " : "") + uid + "|" + label;
    }
    CHECK(parse_explanation(cell) == expected);
  }
}

TEST_CASE("split_choices") {
  std::string stem;
  std::map<std::string, std::string> choices;
  CHECK(split_choices("Which is living? (A) rock (B) frog", stem, choices));
  CHECK(stem == "Which is living?");
  CHECK(choices == std::map<std::string, std::string>{{"A", "rock"}, {"B", "frog"}});

  CHECK_FALSE(split_choices("no markers here", stem, choices));
  CHECK(stem == "no markers here");
  CHECK(choices.empty());

  CHECK_FALSE(split_choices("Q (A) (B) frog", stem, choices));
  CHECK(stem == "Q (A) (B) frog");
}

TEST_CASE("load_questions") {
  const auto dir = scratch("questions");
  tsv::write_file(dir / "q.tsv",
                  "QuestionID\tquestion\tAnswerKey\texplanation\n"
                  "q1\tWhich is living? (A) rock (B) frog\tB\tx1|CENTRAL x2|GROUNDING\n"
                  "q2\tWhich is living? (A) rock (B) frog\tA\t\n"
                  "q3\tBroken text without markers\tA\tx1|CENTRAL\n"
                  "q4\tPick (A) one (B) two\tC\t\n");
  const auto file = load_questions(dir / "q.tsv");
  REQUIRE(file.questions.size() == 2);
  const auto& q1 = file.questions[0];
  CHECK(q1.stem == "Which is living?");
  CHECK(answer_text(q1) == "frog");
  CHECK(q1.gold == std::vector<GoldFact>{{"x1", Role::central()}, {"x2", Role::grounding()}});
  CHECK(file.questions[1].gold.empty());

  CHECK(file.report.count(IssueKind::kMalformedChoices) == 1);
  CHECK(file.report.count(IssueKind::kAnswerKey) == 2);  // q3 (no choices) and q4
  CHECK(file.report.has_errors());
}

TEST_CASE("load_questions honours configured columns") {
  const auto dir = scratch("questions_cols");
  tsv::write_file(dir / "q.tsv", "id\ttext\tkey\texpl\nq1\tQ (A) a (B) b\tA\tf|NEG\n");
  QuestionColumns cols{"id", "text", "key", "expl"};
  const auto file = load_questions(dir / "q.tsv", cols);
  REQUIRE(file.questions.size() == 1);
  CHECK(file.questions[0].gold.front().role == Role::neg());
  CHECK_THROWS_AS(load_questions(dir / "q.tsv"), FormatError);
}

TEST_CASE("answer_text") {
  Question q;
  q.choices = {{"A", "rock"}, {"B", "frog"}};
  q.answer_key = "B";
  CHECK(answer_text(q) == "frog");
  q.choices = {{"A", "a girl eating an apple"}};
  q.answer_key = "A";
  CHECK(answer_text(q) == "a girl eating an apple");
  q.choices = {{"A", "x"}, {"B", "y"}};
  q.answer_key = "C";
  CHECK_THROWS_AS(answer_text(q), ContentError);
}

TEST_CASE("question writer round-trips through load_questions") {
  std::mt19937_64 rng(11);
  const auto corpus = testing::random_corpus(rng, {.questions = 25, .facts = 40});
  const auto dir = scratch("questions_roundtrip");
  write_questions(corpus.questions(), dir / "q.tsv");
  const auto file = load_questions(dir / "q.tsv");
  CHECK(file.report.issues.empty());
  CHECK(file.questions == corpus.questions());
}

TEST_CASE("validate") {
  FactTable facts;
  facts.add({"x1", "a", "t"});
  facts.add({"x2", "b", "t"});

  SUBCASE("clean corpus has no issues") {
    Corpus corpus(facts, {{"q1", "s", {{"A", "a"}}, "A", {{"x1", Role::central()}}}});
    CHECK(validate(corpus).issues.empty());
  }
  SUBCASE("dangling gold uid") {
    Corpus corpus(facts, {{"q1", "s", {{"A", "a"}}, "A", {{"zz9", Role::central()}}}});
    const auto report = validate(corpus);
    REQUIRE(report.issues.size() == 1);
    CHECK(report.issues[0].kind == IssueKind::kDanglingGold);
    CHECK(report.issues[0].qid == "q1");
    CHECK(report.issues[0].detail == "zz9");
    CHECK(report.has_errors());
  }
  SUBCASE("gold size warning above 16") {
    std::vector<GoldFact> gold(17, {"x1", Role::central()});
    Corpus corpus(facts, {{"q1", "s", {{"A", "a"}}, "A", gold}});
    const auto report = validate(corpus);
    CHECK(report.count(IssueKind::kGoldSize) == 1);
    CHECK_FALSE(report.has_errors());
  }
  SUBCASE("empty gold is a warning") {
    Corpus corpus(facts, {{"q1", "s", {{"A", "a"}}, "A", {}}});
    const auto report = validate(corpus);
    CHECK(report.count(IssueKind::kEmptyGold) == 1);
    CHECK_FALSE(report.has_errors());
  }
  SUBCASE("duplicate qid") {
    Question q{"q1", "s", {{"A", "a"}}, "A", {{"x1", Role::central()}}};
    Corpus corpus(facts, {q, q});
    CHECK(validate(corpus).count(IssueKind::kDuplicateQid) == 1);
  }
}
