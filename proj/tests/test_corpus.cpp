#include "support.hpp"

#include "phb/identities.hpp"

#include <gtest/gtest.h>

using namespace phb;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_corpus(text);
  } catch (const CorpusError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Corpus, DefaultCorpusHasAScriptPerRecord) {
  const Corpus c = phb::testing::default_corpus();
  const std::vector<std::string> ids = {"2.1", "2.2", "2.3", "2.7", "2.8", "2.8.ibp", "2.9", "2.10", "2.11",
                                        "3.1", "3.2", "3.3", "3.4", "3.5", "3.6", "3.7", "3.8"};
  EXPECT_EQ(c.ids(), ids);
  for (const auto& r : c.records()) {
    EXPECT_TRUE(scripts().count(r.id)) << r.id;
    EXPECT_FALSE(r.title.empty()) << r.id;
    EXPECT_FALSE(r.latex.empty()) << r.id;
    EXPECT_FALSE(r.mutation_targets().empty()) << r.id;
  }
}

TEST(Corpus, FieldsAndContinuations) {
  const Corpus c = parse_corpus(
      "# comment\n"
      "[x]\n"
      "title: a\n"
      "  b\n"
      "expr lhs: f_{1}\n"
      "  + f_{b}\n"
      "param alpha: i*s3\n"
      "mutate: alpha\n"
      "\n"
      "[y]\n"
      "expr rhs: R\n");
  ASSERT_EQ(c.records().size(), 2u);
  const auto& x = c.at("x");
  EXPECT_EQ(x.title, "a b");
  EXPECT_EQ(x.expr("lhs"), parse("f_{1} + f_{b}"));
  EXPECT_EQ(x.param("alpha"), "i*s3");
  EXPECT_EQ(x.mutation_targets(), std::vector<std::string>{"alpha"});
  EXPECT_EQ(c.at("y").mutation_targets(), std::vector<std::string>{"rhs"});
  EXPECT_EQ(c.find("z"), nullptr);
  EXPECT_THROW(c.at("z"), std::out_of_range);
  EXPECT_THROW(x.text("nope"), std::out_of_range);
}

TEST(Corpus, ErrorsReportLineNumbers) {
  EXPECT_EQ(error_line("title: x\n"), 1u);
  EXPECT_EQ(error_line("[a]\n  stray\n"), 2u);
  EXPECT_EQ(error_line("[a\n"), 1u);
  EXPECT_EQ(error_line("[a]\n[a]\n"), 2u);
  EXPECT_EQ(error_line("[]\n"), 1u);
  EXPECT_EQ(error_line("[a]\nnonsense\n"), 2u);
  EXPECT_EQ(error_line("[a]\ncolour: red\n"), 2u);
  EXPECT_EQ(error_line("[a]\nexpr x: f\nexpr x: R\n"), 3u);
  EXPECT_EQ(error_line("[a]\ntitle: t\nexpr x: f +* R\n"), 3u);
  EXPECT_EQ(error_line("[a]\nexpr x: f\nmutate: y\n"), 3u);
  EXPECT_THROW(load_corpus("/nonexistent/identities.corpus"), std::runtime_error);
}
