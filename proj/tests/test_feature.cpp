#include <doctest.h>

#include <vector>

#include "punct/feature.hpp"
#include "test_util.hpp"

using punct::BindingEnv;
using punct::Category;
using punct::FeatureValue;
using testutil::cat;
using testutil::val;

TEST_CASE("unify_value on atoms and variables") {
  BindingEnv empty;
  auto same = punct::unify_value(val("c"), val("c"), empty);
  REQUIRE(same);
  CHECK(same->empty());

  CHECK_FALSE(punct::unify_value(val("c"), val("f"), empty));

  auto bound = punct::unify_value(val("S"), val("f"), empty);
  REQUIRE(bound);
  REQUIRE(bound->lookup("S") != nullptr);
  CHECK(*bound->lookup("S") == val("f"));
  CHECK(empty.empty());  // input untouched

  CHECK(punct::unify_value(val("-"), val("-"), empty));
  CHECK_FALSE(punct::unify_value(val("-"), val("c"), empty));
}

TEST_CASE("unify_value follows variable chains") {
  auto env = punct::unify_value(val("A"), val("B"), BindingEnv());
  REQUIRE(env);
  env = punct::unify_value(val("B"), val("+"), *env);
  REQUIRE(env);
  CHECK(env->resolve(val("A")) == val("+"));
  CHECK_FALSE(punct::unify_value(val("A"), val("-"), *env));
  CHECK(punct::unify_value(val("A"), val("A"), BindingEnv())->empty());
}

TEST_CASE("unify_category") {
  CHECK(punct::unify_category(cat("np", {{"st", "c"}}), cat("np", {{"st", "c"}}),
                              BindingEnv()));
  // anti-nesting clash
  CHECK_FALSE(punct::unify_category(cat("np", {{"cm", "+"}, {"st", "-"}}),
                                    cat("np", {{"cm", "-"}}), BindingEnv()));
  CHECK_FALSE(punct::unify_category(cat("np"), cat("vp"), BindingEnv()));
  // features on one side only are unconstrained
  CHECK(punct::unify_category(cat("np", {{"pn", "+"}}), cat("np", {{"st", "c"}}),
                              BindingEnv()));

  for (const char* v : {"-", "+"}) {
    auto env = punct::unify_category(cat("s", {{"co", "A"}}),
                                     cat("s", {{"co", v}}), BindingEnv());
    REQUIRE(env);
    CHECK(env->resolve(val("A")) == val(v));
  }
}

TEST_CASE("resolve") {
  BindingEnv env = BindingEnv().bind("S", val("c"));
  CHECK(punct::resolve(cat("n0", {{"st", "S"}}), env) == cat("n0", {{"st", "c"}}));
  CHECK(punct::resolve(cat("n0", {{"st", "S"}}), BindingEnv()) ==
        cat("n0", {{"st", "S"}}));
  BindingEnv two = BindingEnv().bind("A", val("-")).bind("S", val("sc"));
  CHECK(punct::resolve(cat("s", {{"co", "A"}, {"st", "S"}}), two) ==
        cat("s", {{"co", "-"}, {"st", "sc"}}));
  Category once = punct::resolve(cat("s", {{"co", "A"}, {"st", "S"}}), two);
  CHECK(punct::resolve(once, two) == once);
}

TEST_CASE("canonicalize drops lone variables and renames shared ones") {
  Category c = cat("np", {{"cm", "X"}, {"pn", "Y"}, {"st", "X"}});
  CHECK(punct::canonicalize(c).str() == "np[cm=_1,st=_1]");
  CHECK(punct::canonicalize(cat("np", {{"st", "c"}})).str() == "np[st=c]");
  CHECK(punct::canonicalize(cat("np", {{"a", "Q"}, {"b", "Q"}})) ==
        punct::canonicalize(cat("np", {{"a", "Z"}, {"b", "Z"}})));
}

TEST_CASE("str and rename_vars") {
  CHECK(cat("np").str() == "np");
  CHECK(cat("np", {{"st", "-"}, {"cm", "+"}}).str() == "np[cm=+,st=-]");
  CHECK(punct::rename_vars(cat("np", {{"st", "S"}}), "#1").str() ==
        "np[st=S#1]");
}

namespace {

// Every category over features a, b with values {unset, x, y}, with each
// feature also allowed to be absent.
std::vector<Category> GroundAlphabet() {
  const std::vector<std::string> values{"absent", "-", "x", "y"};
  std::vector<Category> out;
  for (const auto& a : values) {
    for (const auto& b : values) {
      Category c("t");
      if (a != "absent") c.set("a", val(a));
      if (b != "absent") c.set("b", val(b));
      out.push_back(c);
    }
  }
  return out;
}

bool AgreeOnShared(const Category& x, const Category& y) {
  for (const auto& [name, value] : x.features()) {
    const FeatureValue* other = y.get(name);
    if (other != nullptr && *other != value) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("exhaustive ground unification over a 2-feature alphabet") {
  auto alphabet = GroundAlphabet();
  for (const auto& x : alphabet) {
    for (const auto& y : alphabet) {
      bool got = punct::unify_category(x, y, BindingEnv()).has_value();
      CHECK_MESSAGE(got == AgreeOnShared(x, y), x.str() << " vs " << y.str());
    }
  }
}

TEST_CASE("unification is commutative and idempotent") {
  // Ground alphabet plus variable-bearing variants.
  auto alphabet = GroundAlphabet();
  std::vector<Category> all = alphabet;
  all.push_back(cat("t", {{"a", "V"}}));
  all.push_back(cat("t", {{"a", "V"}, {"b", "V"}}));
  all.push_back(cat("t", {{"a", "V"}, {"b", "x"}}));
  all.push_back(cat("t", {{"b", "W"}}));
  for (const auto& x : all) {
    auto self = punct::unify_category(x, x, BindingEnv());
    REQUIRE(self);
    CHECK(punct::resolve(x, *self) == x);
    for (const auto& y0 : all) {
      Category y = punct::rename_vars(y0, "'");
      auto xy = punct::unify_category(x, y, BindingEnv());
      auto yx = punct::unify_category(y, x, BindingEnv());
      REQUIRE(xy.has_value() == yx.has_value());
      if (!xy) continue;
      CHECK(punct::canonicalize(punct::resolve(x, *xy)) ==
            punct::canonicalize(punct::resolve(x, *yx)));
      CHECK(punct::canonicalize(punct::resolve(y, *xy)) ==
            punct::canonicalize(punct::resolve(y, *yx)));
    }
  }
}

TEST_CASE("unification failure is monotone under env extension") {
  auto alphabet = GroundAlphabet();
  std::vector<Category> pats{cat("t", {{"a", "V"}}),
                             cat("t", {{"a", "V"}, {"b", "V"}}),
                             cat("t", {{"b", "W"}, {"a", "x"}})};
  std::vector<BindingEnv> envs{BindingEnv(), BindingEnv().bind("V", val("x")),
                               BindingEnv().bind("V", val("-")),
                               BindingEnv().bind("W", val("y")),
                               BindingEnv().bind("V", val("y")).bind("W", val("x"))};
  for (const auto& p : pats) {
    for (const auto& g : alphabet) {
      for (std::size_t i = 0; i < envs.size(); ++i) {
        if (punct::unify_category(p, g, envs[i])) continue;
        // every env that extends envs[i] must fail too
        for (const auto& e : envs) {
          bool extends = true;
          for (const auto& [var, v] : envs[i].bindings()) {
            const FeatureValue* b = e.lookup(var);
            extends = extends && b != nullptr && *b == v;
          }
          if (extends) CHECK_FALSE(punct::unify_category(p, g, e));
        }
      }
    }
  }
}
