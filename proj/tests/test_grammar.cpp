#include <doctest.h>

#include <algorithm>
#include <string>

#include "oracle.hpp"
#include "punct/chart.hpp"
#include "punct/error.hpp"
#include "punct/grammar.hpp"
#include "test_util.hpp"

using punct::Diagnostic;
using punct::Grammar;
using punct::RuleTemplate;
using testutil::cat;

namespace {

const char* kHeader = R"(
feature st { c, sc, co, f }
feature co { + }
punc f  tag FS strength 5 class point
punc c  tag C  strength 1 class point
punc sc tag SC strength 3 class point
punc co tag CO strength 4 class point
lex NN1 np
lex VVD vp
lex II p0
top s[st=f]
)";

Grammar Load(const std::string& rules) {
  return punct::load_grammar(std::string(kHeader) + rules);
}

std::size_t CountDiagnostics(const std::vector<Diagnostic>& ds,
                             Diagnostic::Kind kind) {
  return static_cast<std::size_t>(
      std::count_if(ds.begin(), ds.end(),
                    [&](const Diagnostic& d) { return d.kind == kind; }));
}

}  // namespace

TEST_CASE("optional comma expands into stopped and unstopped variants") {
  Grammar g = Load("rule s -> np (c) vp\n");
  REQUIRE(g.rules.size() == 2);
  const RuleTemplate& with = g.rules[0];
  const RuleTemplate& without = g.rules[1];
  CHECK(with.daughters.size() == 2);
  CHECK(with.daughters[0].category == cat("np", {{"st", "c"}}));
  CHECK(without.daughters[0].category == cat("np", {{"st", "-"}}));
  // ids come from source order and expansion index
  CHECK(with.id == "r1.0");
  CHECK(without.id == "r1.1");
}

TEST_CASE("expand_optionals") {
  Grammar g = Load("rule pp_s: s -> p0 (c) s\nrule plain: s -> np vp\n");
  CHECK(g.rules.size() == 3);
  CHECK(g.find_rule("pp_s.0")->daughters[0].category.get("st")->str() == "c");
  CHECK(g.find_rule("pp_s.1")->daughters[0].category.get("st")->str() == "-");

  const RuleTemplate* plain = g.find_rule("plain");
  REQUIRE(plain != nullptr);
  auto same = punct::expand_optionals(*plain);
  REQUIRE(same.size() == 1);
  CHECK(same[0] == *plain);

  for (int k = 0; k <= 3; ++k) {
    RuleTemplate r;
    r.id = "t";
    r.mother = cat("s");
    r.daughters.push_back({cat("np"), false, false});
    for (int i = 0; i < k; ++i) {
      r.daughters.push_back({cat("punc", {{"mark", "c"}}), true, true});
      r.daughters.push_back({cat("np"), false, false});
    }
    auto variants = punct::expand_optionals(r);
    CHECK(variants.size() == (std::size_t{1} << k));
    // all distinct, first has every mark
    for (std::size_t a = 0; a < variants.size(); ++a) {
      for (std::size_t b = a + 1; b < variants.size(); ++b) {
        CHECK_FALSE(variants[a] == variants[b]);
      }
    }
    for (std::size_t i = 0; i + 1 < variants[0].daughters.size(); ++i) {
      CHECK(variants[0].daughters[i].category.get("st")->str() == "c");
    }
  }
}

TEST_CASE("semicolon rule with variable disjunction expands into 4 rules") {
  Grammar g = Load("rule semi: s[co=A|B] -> s[co=A, st=sc] s[co=B]\n");
  REQUIRE(g.rules.size() == 4);
  std::vector<std::string> seen;
  for (const auto& r : g.rules) {
    std::string a = r.daughters[0].category.get("co")->str();
    std::string b = r.daughters[1].category.get("co")->str();
    std::string m = r.mother.get("co")->str();
    // join: + wins over unset
    CHECK(m == ((a == "+" || b == "+") ? "+" : "-"));
    seen.push_back(a + b);
  }
  std::sort(seen.begin(), seen.end());
  CHECK(seen == std::vector<std::string>{"++", "+-", "-+", "--"});
}

TEST_CASE("atom disjunction yields one rule per value") {
  Grammar g = Load("rule s -> np vp[st=f|sc]\n");
  CHECK(g.rules.size() == 2);
  Grammar tops = punct::load_grammar(std::string(kHeader) +
                                     "top s[st=f|sc]\nrule s -> np vp\n");
  CHECK(tops.tops.size() == 2);  // s[st=f] from the header, then sc
}

TEST_CASE("stop inheritance") {
  Grammar g = Load(
      "rule np_det: np -> p0 np\n"
      "rule appos: np[st=S] -> np[st=c] np[st=-] punc[mark=S]\n"
      "rule unary: s -> vp\n"
      "rule att: np[st=S] -> np[st=-] punc[mark=S]\n");
  const RuleTemplate* det = g.find_rule("np_det");
  REQUIRE(det != nullptr);
  CHECK_FALSE(det->explicit_stop);
  const auto* mst = det->mother.get("st");
  const auto* dst = det->daughters.back().category.get("st");
  REQUIRE(mst != nullptr);
  REQUIRE(dst != nullptr);
  CHECK(mst->is_var());
  CHECK(*mst == *dst);
  // non-rightmost daughters are unstopped by default
  CHECK(det->daughters[0].category.get("st")->str() == "-");

  const RuleTemplate* appos = g.find_rule("appos");
  CHECK(appos->explicit_stop);
  CHECK(appos->mother.get("st")->str() == "S");
  CHECK(appos->daughters[1].category.get("st")->str() == "-");

  const RuleTemplate* unary = g.find_rule("unary");
  CHECK(*unary->mother.get("st") == *unary->daughters[0].category.get("st"));

  // applying it again changes nothing
  for (const auto& r : g.rules) CHECK(punct::apply_stop_inheritance(r) == r);
}

TEST_CASE("every bundled rule links or sets its stop value") {
  const Grammar& g = testutil::bundled_grammar();
  for (const auto& r : g.rules) {
    INFO(r.str());
    const auto* mst = r.mother.get("st");
    REQUIRE(mst != nullptr);
    if (r.explicit_stop) {
      if (!mst->is_var()) continue;
      // a variable mother stop must come from some daughter
      bool found = false;
      for (const auto& d : r.daughters) {
        for (const auto& [f, v] : d.category.features()) {
          found = found || v == *mst;
        }
      }
      CHECK(found);
    } else {
      const auto& last = r.daughters.back();
      if (last.is_punct_terminal) {
        CHECK(*mst == *last.category.get("mark"));
      } else {
        REQUIRE(last.category.get("st") != nullptr);
        CHECK(*mst == *last.category.get("st"));
      }
    }
  }
}

TEST_CASE("loader errors") {
  CHECK_THROWS_AS(Load("rule s ->\n"), punct::DataError);
  CHECK_THROWS_AS(Load("rule s -> np[zz=+] vp\n"), punct::DataError);
  CHECK_THROWS_AS(Load("rule s -> np[co=q] vp\n"), punct::DataError);
  CHECK_THROWS_AS(Load("rule s[co=A] -> np vp\n"), punct::DataError);
  CHECK_THROWS_AS(Load("rule a: s -> np vp\nrule a: s -> vp np\n"),
                  punct::DataError);
  CHECK_THROWS_AS(Load("rule s -> (c) np\n"), punct::DataError);
  CHECK_THROWS_AS(Load("ablate merge nope into r1\nrule s -> np vp\n"),
                  punct::DataError);
  try {
    Load("rule s -> np vp\nrule s ->\n");
    FAIL("expected an error");
  } catch (const punct::DataError& e) {
    CHECK(e.line() == 13);
    CHECK(e.located("x.grammar").rfind("x.grammar:13", 0) == 0);
  }
}

TEST_CASE("load, dump, load is a fixpoint") {
  const Grammar& g = testutil::bundled_grammar();
  std::string text = punct::dump_grammar(g);
  Grammar again = punct::load_grammar(text);
  CHECK(again == g);
  CHECK(punct::dump_grammar(again) == text);

  Grammar small = Load(
      "rule semi: s[co=A|B] -> s[co=A, st=sc] s[co=B]\n"
      "rule s -> np (c) vp\n"
      "ablate strip st\n");
  CHECK(punct::load_grammar(punct::dump_grammar(small)) == small);
}

TEST_CASE("validate_grammar") {
  const Grammar& g = testutil::bundled_grammar();
  std::set<std::string> tags;
  for (const auto& s : testutil::mini_corpus().sentences) {
    for (const auto& t : s.tokens) tags.insert(t.tag);
  }
  auto clean = punct::validate_grammar(g, tags);
  std::string messages;
  for (const auto& d : clean) messages += d.message + "; ";
  CHECK_MESSAGE(clean.empty(), messages);

  Grammar missing = g;
  missing.lexicon.erase("NN1");
  auto ds = punct::validate_grammar(missing, {"NN1"});
  CHECK(CountDiagnostics(ds, Diagnostic::Kind::kMissingTag) == 1);

  Grammar dead = Load(
      "rule s -> np vp\n"
      "rule stuck: s -> p0[st=c] s\n");
  auto dd = punct::validate_grammar(dead);
  REQUIRE(CountDiagnostics(dd, Diagnostic::Kind::kDeadRule) == 1);
  auto it = std::find_if(dd.begin(), dd.end(), [](const Diagnostic& d) {
    return d.kind == Diagnostic::Kind::kDeadRule;
  });
  CHECK(it->message.find("stuck") != std::string::npos);
}

TEST_CASE("schema expansion preserves derivations") {
  // The same grammar written with optionals and disjunctions, and by hand.
  const std::string schema =
      "rule s -> np (c) vp\n"
      "rule s -> p0 (c) s\n"
      "rule s[co=A|B] -> s[co=A, st=sc] s[co=B]\n"
      "rule s[co=+] -> s[co=-, st=co] s[co=-]\n";
  const std::string hand =
      "rule s -> np[st=c] vp\n"
      "rule s -> np[st=-] vp\n"
      "rule s -> p0[st=c] s\n"
      "rule s -> p0[st=-] s\n"
      "rule s[co=-] -> s[co=-, st=sc] s[co=-]\n"
      "rule s[co=+] -> s[co=-, st=sc] s[co=+]\n"
      "rule s[co=+] -> s[co=+, st=sc] s[co=-]\n"
      "rule s[co=+] -> s[co=+, st=sc] s[co=+]\n"
      "rule s[co=+] -> s[co=-, st=co] s[co=-]\n"
      "rule np[st=S] -> np[st=-] punc[mark=S]\n"
      "rule vp[st=S] -> vp[st=-] punc[mark=S]\n"
      "rule p0[st=S] -> p0[st=-] punc[mark=S]\n";
  const std::string att =
      "rule np[st=S] -> np[st=-] punc[mark=S]\n"
      "rule vp[st=S] -> vp[st=-] punc[mark=S]\n"
      "rule p0[st=S] -> p0[st=-] punc[mark=S]\n";
  Grammar a = Load(schema + att);
  Grammar b = Load(hand);
  const char* sentences[] = {
      "a_NN1 b_VVD ._FS",
      "a_NN1 ,_C b_VVD ._FS",
      "in_II ,_C a_NN1 b_VVD ._FS",
      "a_NN1 b_VVD :_CO a_NN1 b_VVD ;_SC a_NN1 b_VVD ._FS",
      "a_NN1 b_VVD ;_SC in_II a_NN1 b_VVD ._FS",
  };
  for (const char* text : sentences) {
    INFO(text);
    auto s = testutil::line(text, a);
    auto ta = punct::unpack(punct::parse(s, a), 1000);
    auto tb = punct::unpack(punct::parse(s, b), 1000);
    std::vector<std::string> ba, bb;
    for (const auto& t : ta) ba.push_back(punct::bracketed(t));
    for (const auto& t : tb) bb.push_back(punct::bracketed(t));
    std::sort(ba.begin(), ba.end());
    std::sort(bb.begin(), bb.end());
    CHECK(ba == bb);
    CHECK_FALSE(ba.empty());
  }
}
