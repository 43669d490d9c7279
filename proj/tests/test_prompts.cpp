#include <doctest.h>

#include <fstream>
#include <sstream>

#include "pcc/errors.hpp"
#include "pcc/prompts.hpp"

using namespace pcc;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const TemplateId kAll[] = {
    TemplateId::VerbalConfidence, TemplateId::VerdictToken,  TemplateId::RationaleTrue,
    TemplateId::RationaleFalse,   TemplateId::TargetedQuery, TemplateId::ReflectionQuery,
    TemplateId::DeepVerdict,
};

}  // namespace

TEST_CASE("shipped templates match golden files byte-for-byte") {
  for (TemplateId id : kAll) {
    const std::string name = template_name(id);
    CAPTURE(name);
    CHECK(slurp(std::string(PCC_TEMPLATE_DIR) + "/" + name + ".txt") ==
          slurp(std::string(PCC_GOLDEN_DIR) + "/" + name + ".txt"));
  }
}

TEST_CASE("scan_placeholders recognizes only {lower_snake} names") {
  CHECK(scan_placeholders("a {statement} b") == std::set<std::string>{"statement"});
  CHECK(scan_placeholders("{premise} vs {hypothesis}") ==
        std::set<std::string>{"premise", "hypothesis"});
  CHECK(scan_placeholders("{Bad} {UPPER} {with space}").empty());
  CHECK(scan_placeholders("{} { } {unclosed").empty());
  CHECK(scan_placeholders("json example { \"k\": 1 }").empty());
  CHECK(scan_placeholders("{a_b}{c}") == std::set<std::string>{"a_b", "c"});
}

TEST_CASE("library loads all seven templates with expected placeholders") {
  const PromptLibrary lib = PromptLibrary::load(PCC_TEMPLATE_DIR);
  CHECK(lib.get(TemplateId::VerdictToken).placeholders == std::set<std::string>{"statement"});
  CHECK(lib.get(TemplateId::VerbalConfidence).placeholders == std::set<std::string>{"statement"});
  CHECK(lib.get(TemplateId::RationaleTrue).placeholders == std::set<std::string>{"claim"});
  CHECK(lib.get(TemplateId::RationaleFalse).placeholders == std::set<std::string>{"claim"});
  CHECK(lib.get(TemplateId::TargetedQuery).placeholders ==
        std::set<std::string>{"premise", "hypothesis"});
  CHECK(lib.get(TemplateId::ReflectionQuery).placeholders == std::set<std::string>{"statement"});
  CHECK(lib.get(TemplateId::DeepVerdict).placeholders == std::set<std::string>{"statement"});
}

TEST_CASE("render substitutes and preserves literal braces") {
  const PromptLibrary lib = PromptLibrary::load(PCC_TEMPLATE_DIR);
  const std::string s = lib.render(TemplateId::VerdictToken, {{"statement", "Water is wet."}});
  CHECK(s.size() >= 14);
  CHECK(s.substr(s.size() - std::string("STATEMENT: Water is wet.").size()) ==
        "STATEMENT: Water is wet.");
  CHECK(s.find('{') == std::string::npos);

  // deep verdict keeps its literal JSON skeleton
  const std::string d = lib.render(TemplateId::DeepVerdict, {{"statement", "X"}});
  CHECK(d.find("\"final_answer\": \"True\" or \"False\"") != std::string::npos);
  CHECK(d.find("{statement}") == std::string::npos);

  const std::string t = lib.render(
      TemplateId::TargetedQuery, {{"premise", "P-TEXT"}, {"hypothesis", "H-TEXT"}});
  CHECK(t.find("Premise: \"P-TEXT\"") != std::string::npos);
  CHECK(t.find("Hypothesis: \"H-TEXT\"") != std::string::npos);
}

TEST_CASE("render reports every missing placeholder by name") {
  const PromptLibrary lib = PromptLibrary::load(PCC_TEMPLATE_DIR);
  CHECK_THROWS_AS(lib.render(TemplateId::TargetedQuery, {{"premise", "p"}}), MissingPlaceholder);
  try {
    lib.render(TemplateId::TargetedQuery, {});
    FAIL("expected MissingPlaceholder");
  } catch (const MissingPlaceholder& e) {
    const std::string msg = e.what();
    CHECK(msg.find("{premise}") != std::string::npos);
    CHECK(msg.find("{hypothesis}") != std::string::npos);
  }
  // extra substitutions are harmless
  CHECK_NOTHROW(lib.render(TemplateId::VerdictToken,
                           {{"statement", "s"}, {"unused", "x"}}));
}

TEST_CASE("load fails cleanly on a missing template directory") {
  CHECK_THROWS_AS(PromptLibrary::load("/nonexistent/templates"), FileUnreadable);
}
