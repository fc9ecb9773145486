#include "punct/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>
#include <unordered_set>

#include "punct/error.hpp"

namespace punct {

namespace {

// ---------------------------------------------------------------------------
// Raw (pre-expansion) syntax.

struct RawFeature {
  std::string name;
  std::vector<FeatureValue> alts;  // more than one: a disjunction
  std::size_t column = 0;
};

struct RawCategory {
  std::string cat;
  std::vector<RawFeature> features;
  std::size_t column = 0;
};

struct RawDaughter {
  RawCategory category;
  std::string mark;  // set for bare or optional mark daughters
  bool optional = false;
  std::size_t column = 0;
};

struct RawRule {
  std::string id;
  bool explicit_id = false;
  RawCategory mother;
  std::vector<RawDaughter> daughters;
  std::size_t line = 0;
};

struct RawCatLine {
  std::string key;
  RawCategory category;
  std::size_t line = 0;
};

bool IsIdentChar(char c) {
  unsigned char u = static_cast<unsigned char>(c);
  if (std::isalnum(u)) return true;
  switch (c) {
    case '_': case '$': case '.': case '+': case '-': case '*': case '\'':
    case '`': case '&': case '/': case '@': case '!': case '?': case ';':
    case '"':
      return true;
    default:
      return u >= 0x80;  // UTF-8 continuation/lead bytes
  }
}

bool IsVarName(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

FeatureValue ParseValue(std::string_view text) {
  if (text == "-" || text == "--") return FeatureValue::Unset();
  if (IsVarName(text)) return FeatureValue::Var(std::string(text));
  return FeatureValue::Atom(std::string(text));
}

// Cursor over one line of DSL text with 1-based column reporting.
class Cursor {
 public:
  Cursor(std::string_view text, std::size_t line, std::size_t offset = 0)
      : text_(text), line_(line), pos_(offset) {}

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }
  bool AtEnd() {
    SkipSpace();
    return pos_ >= text_.size();
  }
  char Peek() {
    SkipSpace();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool PeekArrow() {
    SkipSpace();
    return text_.substr(pos_, 2) == "->";
  }
  std::size_t column() const { return pos_ + 1; }
  std::size_t line() const { return line_; }

  void Expect(char c) {
    if (Peek() != c) Fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool Accept(char c) {
    if (Peek() != c) return false;
    ++pos_;
    return true;
  }
  void ExpectArrow() {
    if (!PeekArrow()) Fail("expected '->'");
    pos_ += 2;
  }

  std::string Ident(const char* what) {
    SkipSpace();
    std::size_t start = pos_;
    while (pos_ < text_.size() && IsIdentChar(text_[pos_])) {
      if (text_.substr(pos_, 2) == "->") break;
      ++pos_;
    }
    if (start == pos_) Fail(std::string("expected ") + what);
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string Rest() {
    SkipSpace();
    std::string out(text_.substr(pos_));
    pos_ = text_.size();
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back())))
      out.pop_back();
    return out;
  }

  [[noreturn]] void Fail(const std::string& msg) {
    throw DataError(msg, line_, column());
  }

 private:
  std::string_view text_;
  std::size_t line_;
  std::size_t pos_;
};

RawCategory ParseCategory(Cursor& cur) {
  RawCategory out;
  out.column = cur.column();
  out.cat = cur.Ident("category name");
  if (!cur.Accept('[')) return out;
  if (cur.Accept(']')) return out;
  do {
    RawFeature f;
    f.column = cur.column();
    f.name = cur.Ident("feature name");
    cur.Expect('=');
    do {
      f.alts.push_back(ParseValue(cur.Ident("feature value")));
    } while (cur.Accept('|'));
    for (const auto& existing : out.features) {
      if (existing.name == f.name) {
        throw DataError("feature '" + f.name + "' given twice", cur.line(),
                        f.column);
      }
    }
    out.features.push_back(std::move(f));
  } while (cur.Accept(','));
  cur.Expect(']');
  return out;
}

// ---------------------------------------------------------------------------
// Expansion helpers.

std::size_t ValueRank(const FeatureDecl& decl, const FeatureValue& v) {
  if (v.is_unset()) return 0;
  auto it = std::find(decl.values.begin(), decl.values.end(), v.name());
  return static_cast<std::size_t>(it - decl.values.begin()) + 1;
}

FeatureValue Substitute(const FeatureValue& v,
                        const std::map<std::string, FeatureValue>& binding) {
  if (v.is_var()) {
    auto it = binding.find(v.name());
    if (it != binding.end()) return it->second;
  }
  return v;
}

class Expander {
 public:
  Expander(const std::vector<FeatureDecl>& decls, const PunctTable& punct,
           std::size_t line)
      : decls_(decls), punct_(punct), line_(line) {}

  const FeatureDecl& Decl(const std::string& feature, std::size_t column) {
    for (const auto& d : decls_) {
      if (d.name == feature) return d;
    }
    throw DataError("undeclared feature '" + feature + "'", line_, column);
  }

  // Every disjunction with a variable operand contributes its variables
  // for enumeration; purely atomic disjunctions become choice points.
  void Collect(const RawCategory& c) {
    for (const auto& f : c.features) {
      if (f.alts.size() < 2) continue;
      bool has_var = std::any_of(f.alts.begin(), f.alts.end(),
                                 [](const FeatureValue& v) { return v.is_var(); });
      if (!has_var) {
        choices_.push_back(&f);
        continue;
      }
      const FeatureDecl& decl = Decl(f.name, f.column);
      for (const auto& v : f.alts) {
        if (!v.is_var()) continue;
        if (std::none_of(vars_.begin(), vars_.end(),
                         [&](const auto& p) { return p.first == v.name(); })) {
          vars_.emplace_back(v.name(), &decl);
        }
      }
    }
  }

  // All ground instantiations of the disjunctions, in odometer order
  // (first variable / first choice slowest).
  std::vector<std::pair<std::map<std::string, FeatureValue>,
                        std::map<const RawFeature*, FeatureValue>>>
  Enumerate() {
    std::vector<std::vector<FeatureValue>> var_domains;
    for (const auto& [name, decl] : vars_) {
      std::vector<FeatureValue> dom{FeatureValue::Unset()};
      for (const auto& v : decl->values) dom.push_back(FeatureValue::Atom(v));
      var_domains.push_back(std::move(dom));
    }
    std::vector<std::size_t> radix;
    for (const auto& d : var_domains) radix.push_back(d.size());
    for (const auto* f : choices_) radix.push_back(f->alts.size());

    std::vector<std::pair<std::map<std::string, FeatureValue>,
                          std::map<const RawFeature*, FeatureValue>>>
        out;
    std::vector<std::size_t> idx(radix.size(), 0);
    while (true) {
      std::map<std::string, FeatureValue> binding;
      std::map<const RawFeature*, FeatureValue> chosen;
      for (std::size_t i = 0; i < vars_.size(); ++i) {
        binding[vars_[i].first] = var_domains[i][idx[i]];
      }
      for (std::size_t j = 0; j < choices_.size(); ++j) {
        chosen[choices_[j]] = choices_[j]->alts[idx[vars_.size() + j]];
      }
      out.emplace_back(std::move(binding), std::move(chosen));
      std::size_t k = radix.size();
      while (k > 0) {
        --k;
        if (++idx[k] < radix[k]) break;
        idx[k] = 0;
        if (k == 0) return out;
      }
      if (radix.empty()) return out;
    }
  }

  Category Instantiate(const RawCategory& raw,
                       const std::map<std::string, FeatureValue>& binding,
                       const std::map<const RawFeature*, FeatureValue>& chosen) {
    Category out(raw.cat);
    for (const auto& f : raw.features) {
      FeatureValue value;
      if (f.alts.size() == 1) {
        value = Substitute(f.alts[0], binding);
      } else if (auto it = chosen.find(&f); it != chosen.end()) {
        value = it->second;
      } else {
        const FeatureDecl& decl = Decl(f.name, f.column);
        std::size_t best = 0;
        for (const auto& alt : f.alts) {
          FeatureValue g = Substitute(alt, binding);
          if (g.is_atom() && ValueRank(decl, g) > decl.values.size()) {
            throw DataError("value '" + g.name() +
                                "' is not declared for feature '" + f.name + "'",
                            line_, f.column);
          }
          if (ValueRank(decl, g) >= ValueRank(decl, value)) {
            best = ValueRank(decl, g);
            value = g;
          }
        }
        (void)best;
      }
      out.set(f.name, value);
    }
    return out;
  }

 private:
  const std::vector<FeatureDecl>& decls_;
  const PunctTable& punct_;
  std::size_t line_;
  std::vector<std::pair<std::string, const FeatureDecl*>> vars_;
  std::vector<const RawFeature*> choices_;
};

Category MarkCategory(const std::string& mark) {
  Category c{std::string(kPunctCat)};
  c.set(std::string(kMarkFeature), FeatureValue::Atom(mark));
  return c;
}

void CollectVars(const Category& c, std::set<std::string>& out) {
  for (const auto& [name, value] : c.features()) {
    if (value.is_var()) out.insert(value.name());
  }
}

// ---------------------------------------------------------------------------
// Grammar construction.

class Loader {
 public:
  Grammar Load(std::string_view source) {
    std::size_t lineno = 0;
    std::size_t start = 0;
    while (start <= source.size()) {
      std::size_t end = source.find('\n', start);
      if (end == std::string_view::npos) end = source.size();
      ++lineno;
      std::string_view line = source.substr(start, end - start);
      std::size_t hash = line.find('#');
      if (hash != std::string_view::npos) line = line.substr(0, hash);
      ParseLine(line, lineno);
      if (end == source.size()) break;
      start = end + 1;
    }
    return Build();
  }

 private:
  void ParseLine(std::string_view line, std::size_t lineno) {
    Cursor cur(line, lineno);
    if (cur.AtEnd()) return;
    std::size_t kw_col = cur.column();
    std::string keyword = cur.Ident("directive");
    if (keyword == "feature") {
      ParseFeature(cur);
    } else if (keyword == "punc") {
      ParsePunc(cur);
    } else if (keyword == "lex") {
      RawCatLine entry;
      entry.line = lineno;
      entry.key = cur.Ident("tag");
      entry.category = ParseCategory(cur);
      if (!cur.AtEnd()) cur.Fail("unexpected text after category");
      lex_.push_back(std::move(entry));
    } else if (keyword == "top") {
      RawCatLine entry;
      entry.line = lineno;
      entry.category = ParseCategory(cur);
      if (!cur.AtEnd()) cur.Fail("unexpected text after category");
      top_.push_back(std::move(entry));
    } else if (keyword == "rule") {
      ParseRule(cur);
    } else if (keyword == "ablate") {
      ParseAblate(cur);
    } else {
      throw DataError("unknown directive '" + keyword + "'", lineno, kw_col);
    }
  }

  void ParseFeature(Cursor& cur) {
    FeatureDecl decl;
    std::size_t col = cur.column();
    decl.name = cur.Ident("feature name");
    cur.Expect('{');
    if (!cur.Accept('}')) {
      do {
        std::string v = cur.Ident("feature value");
        if (v == "-" || v == "--") continue;
        if (IsVarName(v)) cur.Fail("feature values must not be variables");
        if (std::find(decl.values.begin(), decl.values.end(), v) ==
            decl.values.end()) {
          decl.values.push_back(v);
        }
      } while (cur.Accept(','));
      cur.Expect('}');
    }
    if (!cur.AtEnd()) cur.Fail("unexpected text after feature declaration");
    for (const auto& d : decls_) {
      if (d.name == decl.name) {
        throw DataError("feature '" + decl.name + "' declared twice", cur.line(),
                        col);
      }
    }
    decls_.push_back(std::move(decl));
  }

  void ParsePunc(Cursor& cur) {
    PunctMark mark;
    mark.symbol = cur.Ident("mark symbol");
    bool have_tag = false, have_strength = false, have_class = false;
    while (!cur.AtEnd()) {
      std::string key = cur.Ident("punc attribute");
      std::size_t col = cur.column();
      std::string value = cur.Ident("attribute value");
      if (key == "tag") {
        mark.tag = value;
        have_tag = true;
      } else if (key == "strength") {
        if (value.size() != 1 || value[0] < '1' || value[0] > '5') {
          throw DataError("strength must be 1-5", cur.line(), col);
        }
        mark.strength = value[0] - '0';
        have_strength = true;
      } else if (key == "class") {
        auto cls = parse_mark_class(value);
        if (!cls) throw DataError("unknown mark class '" + value + "'",
                                  cur.line(), col);
        mark.cls = *cls;
        have_class = true;
      } else if (key == "side") {
        auto side = parse_mark_side(value);
        if (!side) throw DataError("unknown mark side '" + value + "'",
                                   cur.line(), col);
        mark.side = *side;
      } else {
        throw DataError("unknown punc attribute '" + key + "'", cur.line(),
                        col);
      }
    }
    if (!have_tag || !have_strength || !have_class) {
      cur.Fail("punc needs tag, strength and class");
    }
    try {
      punct_.add(std::move(mark));
    } catch (const DataError& e) {
      throw DataError(e.message(), cur.line());
    }
  }

  void ParseRule(Cursor& cur) {
    RawRule rule;
    rule.line = cur.line();
    // Optional "id:" label.
    {
      Cursor probe = cur;
      std::string first = probe.Ident("rule");
      if (probe.Accept(':')) {
        rule.id = first;
        rule.explicit_id = true;
        cur = probe;
      }
    }
    rule.mother = ParseCategory(cur);
    cur.ExpectArrow();
    while (!cur.AtEnd()) {
      RawDaughter d;
      d.column = cur.column();
      if (cur.Accept('(')) {
        d.mark = cur.Ident("punctuation mark");
        d.optional = true;
        cur.Expect(')');
      } else {
        d.category = ParseCategory(cur);
        if (d.category.features.empty() && d.category.cat != kPunctCat &&
            IsMarkSymbolCandidate(d.category.cat)) {
          d.mark = d.category.cat;
        }
      }
      rule.daughters.push_back(std::move(d));
    }
    if (rule.daughters.empty()) {
      throw DataError("rule has no daughters", cur.line(), cur.column());
    }
    raw_rules_.push_back(std::move(rule));
  }

  // Bare daughters are resolved against the punctuation table once the
  // whole file has been read; remember candidates here.
  static bool IsMarkSymbolCandidate(const std::string&) { return true; }

  void ParseAblate(Cursor& cur) {
    std::string what = cur.Ident("'strip' or 'merge'");
    if (what == "strip") {
      while (!cur.AtEnd()) ablate_strip_.push_back(cur.Ident("feature name"));
      have_strip_ = true;
    } else if (what == "merge") {
      MergeEntry m;
      m.drop = cur.Ident("rule id");
      if (cur.Ident("'into'") != "into") cur.Fail("expected 'into'");
      m.keep = cur.Ident("rule id");
      if (!cur.AtEnd()) cur.Fail("unexpected text after merge entry");
      merges_.push_back({std::move(m), cur.line()});
    } else {
      cur.Fail("expected 'strip' or 'merge'");
    }
  }

  void CheckCategory(const Category& c, std::size_t line, std::size_t column,
                     const Grammar& g) {
    for (const auto& [name, value] : c.features()) {
      const FeatureDecl* decl = g.decl(name);
      if (decl == nullptr) {
        throw DataError("undeclared feature '" + name + "' on " + c.cat(),
                        line, column);
      }
      if (value.is_atom() &&
          std::find(decl->values.begin(), decl->values.end(), value.name()) ==
              decl->values.end()) {
        throw DataError("value '" + value.name() +
                            "' is not declared for feature '" + name + "'",
                        line, column);
      }
    }
  }

  // Materializes unset stop values. Categories whose stop value is linked
  // by inheritance are skipped, as are punctuation terminals.
  void MaterializeStop(RuleTemplate& r) {
    const std::string st(kStopFeature);
    auto fill = [&](Category& c) {
      if (!c.has(st)) c.set(st, FeatureValue::Unset());
    };
    if (r.explicit_stop) fill(r.mother);
    for (std::size_t i = 0; i < r.daughters.size(); ++i) {
      auto& d = r.daughters[i];
      if (d.is_punct_terminal) continue;
      bool rightmost = i + 1 == r.daughters.size();
      if (rightmost && !r.explicit_stop) continue;
      fill(d.category);
    }
  }

  Grammar Build() {
    Grammar g;
    g.punct_table = punct_;
    g.feature_decls = decls_;
    // `mark` ranges over the declared punctuation symbols unless given.
    if (g.decl(kMarkFeature) == nullptr && !punct_.empty()) {
      FeatureDecl mark{std::string(kMarkFeature), {}};
      for (const auto& m : punct_.marks()) mark.values.push_back(m.symbol);
      g.feature_decls.push_back(std::move(mark));
    }
    const bool stop = g.has_stop();

    // Lexicon and top categories.
    auto ground_alternatives = [&](const RawCatLine& entry) {
      Expander ex(g.feature_decls, punct_, entry.line);
      ex.Collect(entry.category);
      std::vector<Category> out;
      for (const auto& [binding, chosen] : ex.Enumerate()) {
        if (!binding.empty()) {
          throw DataError("variables are not allowed here", entry.line,
                          entry.category.column);
        }
        Category c = ex.Instantiate(entry.category, binding, chosen);
        if (!c.is_ground()) {
          throw DataError("variables are not allowed here", entry.line,
                          entry.category.column);
        }
        if (stop && !c.has(kStopFeature)) {
          c.set(std::string(kStopFeature), FeatureValue::Unset());
        }
        CheckCategory(c, entry.line, entry.category.column, g);
        out.push_back(std::move(c));
      }
      return out;
    };
    for (const auto& entry : lex_) {
      std::string key = entry.key;
      bool word_specific = key.find('_') != std::string::npos;
      std::string tag =
          word_specific ? key.substr(key.rfind('_') + 1) : key;
      if (punct_.by_tag(tag) != nullptr) {
        throw DataError("'" + tag + "' is a punctuation tag", entry.line);
      }
      auto& bucket = word_specific ? g.word_lexicon[key] : g.lexicon[key];
      for (auto& c : ground_alternatives(entry)) {
        if (std::find(bucket.begin(), bucket.end(), c) == bucket.end()) {
          bucket.push_back(std::move(c));
        }
      }
    }
    for (const auto& entry : top_) {
      for (auto& c : ground_alternatives(entry)) {
        if (std::find(g.tops.begin(), g.tops.end(), c) == g.tops.end()) {
          g.tops.push_back(std::move(c));
        }
      }
    }

    // Rules.
    std::unordered_set<std::string> ids;
    std::size_t ordinal = 0;
    for (const auto& raw : raw_rules_) {
      ++ordinal;
      std::string base = raw.explicit_id ? raw.id : "r" + std::to_string(ordinal);
      std::vector<RuleTemplate> expanded = ExpandRaw(raw, g);
      for (std::size_t i = 0; i < expanded.size(); ++i) {
        RuleTemplate& r = expanded[i];
        r.id = expanded.size() == 1 ? base : base + "." + std::to_string(i);
        if (!ids.insert(r.id).second) {
          throw DataError("duplicate rule id '" + r.id + "'", raw.line);
        }
        if (stop) {
          MaterializeStop(r);
          r = apply_stop_inheritance(r);
        }
        CheckCategory(r.mother, raw.line, raw.mother.column, g);
        std::set<std::string> daughter_vars;
        for (std::size_t k = 0; k < r.daughters.size(); ++k) {
          CheckCategory(r.daughters[k].category, raw.line,
                        raw.daughters[std::min(k, raw.daughters.size() - 1)]
                            .column,
                        g);
          CollectVars(r.daughters[k].category, daughter_vars);
        }
        std::set<std::string> mother_vars;
        CollectVars(r.mother, mother_vars);
        for (const auto& v : mother_vars) {
          if (!daughter_vars.count(v)) {
            throw DataError("variable '" + v + "' is free in the mother",
                            raw.line, raw.mother.column);
          }
        }
        g.rules.push_back(std::move(r));
      }
    }

    // Ablation settings.
    if (have_strip_) {
      g.ablation_features = ablate_strip_;
    } else {
      for (const char* f : {"st", "cm", "co", "dm", "pm"}) {
        if (g.decl(f) != nullptr) g.ablation_features.push_back(f);
      }
    }
    for (const auto& [m, line] : merges_) {
      auto known = [&](const std::string& id) {
        return std::any_of(g.rules.begin(), g.rules.end(), [&](const auto& r) {
          return r.id == id || r.id.rfind(id + ".", 0) == 0;
        });
      };
      if (!known(m.drop)) throw DataError("unknown rule '" + m.drop + "'", line);
      if (!known(m.keep)) throw DataError("unknown rule '" + m.keep + "'", line);
      g.merges.push_back(m);
    }
    return g;
  }

  std::vector<RuleTemplate> ExpandRaw(const RawRule& raw, const Grammar& g) {
    Expander ex(g.feature_decls, punct_, raw.line);
    ex.Collect(raw.mother);
    for (const auto& d : raw.daughters) {
      if (d.mark.empty()) ex.Collect(d.category);
    }
    std::vector<RuleTemplate> out;
    for (const auto& [binding, chosen] : ex.Enumerate()) {
      RuleTemplate r;
      r.mother = ex.Instantiate(raw.mother, binding, chosen);
      r.explicit_stop = r.mother.has(kStopFeature);
      for (std::size_t i = 0; i < raw.daughters.size(); ++i) {
        const RawDaughter& rd = raw.daughters[i];
        DaughterSpec d;
        if (!rd.mark.empty() && punct_.by_symbol(rd.mark) != nullptr) {
          d.category = MarkCategory(rd.mark);
          d.is_punct_terminal = true;
          d.optional = rd.optional;
          if (rd.optional && i == 0) {
            throw DataError("optional punctuation needs a preceding daughter",
                            raw.line, rd.column);
          }
        } else if (rd.optional) {
          throw DataError("'" + rd.mark + "' is not a punctuation mark",
                          raw.line, rd.column);
        } else {
          d.category = ex.Instantiate(rd.category, binding, chosen);
          d.is_punct_terminal = d.category.cat() == kPunctCat;
        }
        r.daughters.push_back(std::move(d));
      }
      for (auto& variant : expand_optionals(r)) out.push_back(std::move(variant));
    }
    return out;
  }

  std::vector<FeatureDecl> decls_;
  PunctTable punct_;
  std::vector<RawCatLine> lex_;
  std::vector<RawCatLine> top_;
  std::vector<RawRule> raw_rules_;
  std::vector<std::string> ablate_strip_;
  bool have_strip_ = false;
  std::vector<std::pair<MergeEntry, std::size_t>> merges_;
};

void WriteCategory(std::ostream& out, const Category& c) {
  out << c.cat();
  if (c.features().empty()) return;
  out << '[';
  for (std::size_t i = 0; i < c.features().size(); ++i) {
    if (i > 0) out << ", ";
    out << c.features()[i].first << '=' << c.features()[i].second.str();
  }
  out << ']';
}

// The source form of an inherited stop link, for dumping.
RuleTemplate UndoInheritance(const RuleTemplate& r) {
  RuleTemplate out = r;
  if (r.explicit_stop || r.daughters.empty()) return out;
  out.mother.erase(kStopFeature);
  auto& last = out.daughters.back();
  if (last.is_punct_terminal) return out;
  const FeatureValue* st = last.category.get(kStopFeature);
  if (st != nullptr && st->is_var() && st->name() == kInheritVar) {
    last.category.erase(kStopFeature);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string RuleTemplate::str() const {
  std::ostringstream out;
  out << id << ": ";
  WriteCategory(out, mother);
  out << " ->";
  for (const auto& d : daughters) {
    out << ' ';
    if (d.optional) out << '(';
    WriteCategory(out, d.category);
    if (d.optional) out << ')';
  }
  return out.str();
}

const FeatureDecl* Grammar::decl(std::string_view feature) const {
  for (const auto& d : feature_decls) {
    if (d.name == feature) return &d;
  }
  return nullptr;
}

Category Grammar::punct_category(const PunctMark& mark) const {
  Category c = MarkCategory(mark.symbol);
  if (has_stop()) c.set(std::string(kStopFeature), FeatureValue::Unset());
  return c;
}

std::vector<Category> Grammar::lexical_categories(const Token& token) const {
  if (const PunctMark* mark = punct_table.by_tag(token.tag)) {
    return {punct_category(*mark)};
  }
  if (auto it = word_lexicon.find(token.str()); it != word_lexicon.end()) {
    return it->second;
  }
  if (auto it = lexicon.find(token.tag); it != lexicon.end()) {
    return it->second;
  }
  return {};
}

const RuleTemplate* Grammar::find_rule(std::string_view id) const {
  for (const auto& r : rules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Grammar load_grammar(std::string_view source) {
  Loader loader;
  return loader.Load(source);
}

Grammar load_grammar_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grammar file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return load_grammar(buf.str());
}

std::vector<RuleTemplate> expand_optionals(const RuleTemplate& rule) {
  std::vector<std::size_t> optional;
  for (std::size_t i = 0; i < rule.daughters.size(); ++i) {
    if (rule.daughters[i].optional) optional.push_back(i);
  }
  if (optional.empty()) return {rule};

  const std::string st(kStopFeature);
  std::vector<RuleTemplate> out;
  const std::size_t k = optional.size();
  // Bit j of `absent` set means optional daughter j is left out; counting
  // up from 0 lists the all-present variant first.
  for (std::size_t absent = 0; absent < (std::size_t{1} << k); ++absent) {
    RuleTemplate r = rule;
    r.daughters.clear();
    std::size_t j = 0;
    for (std::size_t i = 0; i < rule.daughters.size(); ++i) {
      const DaughterSpec& d = rule.daughters[i];
      if (!d.optional) {
        r.daughters.push_back(d);
        continue;
      }
      bool present = ((absent >> (k - 1 - j)) & 1U) == 0;
      ++j;
      // The mark itself attaches lexically to the preceding material, so
      // only the stop constraint on the preceding daughter remains.
      Category& prev = r.daughters.back().category;
      if (present) {
        prev.set(st, *d.category.get(kMarkFeature));
      } else if (!prev.has(st)) {
        prev.set(st, FeatureValue::Unset());
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

RuleTemplate apply_stop_inheritance(const RuleTemplate& rule) {
  if (rule.explicit_stop || rule.daughters.empty()) return rule;
  RuleTemplate r = rule;
  const std::string st(kStopFeature);
  DaughterSpec& last = r.daughters.back();
  if (last.is_punct_terminal) {
    if (const FeatureValue* mark = last.category.get(kMarkFeature)) {
      r.mother.set(st, *mark);
    }
    return r;
  }
  if (const FeatureValue* v = last.category.get(st)) {
    r.mother.set(st, *v);
  } else {
    FeatureValue link = FeatureValue::Var(std::string(kInheritVar));
    last.category.set(st, link);
    r.mother.set(st, link);
  }
  return r;
}

std::string dump_grammar(const Grammar& g) {
  std::ostringstream out;
  for (const auto& d : g.feature_decls) {
    out << "feature " << d.name << " {";
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      out << (i == 0 ? " " : ", ") << d.values[i];
    }
    out << (d.values.empty() ? "}" : " }") << '\n';
  }
  for (const auto& m : g.punct_table.marks()) {
    out << "punc " << m.symbol << " tag " << m.tag << " strength "
        << m.strength << " class " << to_string(m.cls) << " side "
        << to_string(m.side) << '\n';
  }
  auto lex = [&](const std::map<std::string, std::vector<Category>>& table) {
    for (const auto& [key, cats] : table) {
      for (const auto& c : cats) {
        out << "lex " << key << ' ';
        WriteCategory(out, c);
        out << '\n';
      }
    }
  };
  lex(g.lexicon);
  lex(g.word_lexicon);
  for (const auto& rule : g.rules) {
    RuleTemplate r = UndoInheritance(rule);
    out << "rule " << r.id << ": ";
    WriteCategory(out, r.mother);
    out << " ->";
    for (const auto& d : r.daughters) {
      out << ' ';
      const FeatureValue* mark = d.category.get(kMarkFeature);
      bool bare = d.is_punct_terminal && mark != nullptr && mark->is_atom() &&
                  d.category.features().size() == 1;
      if (bare) {
        out << mark->name();
      } else {
        WriteCategory(out, d.category);
      }
    }
    out << '\n';
  }
  for (const auto& t : g.tops) {
    out << "top ";
    WriteCategory(out, t);
    out << '\n';
  }
  out << "ablate strip";
  for (const auto& f : g.ablation_features) out << ' ' << f;
  out << '\n';
  for (const auto& m : g.merges) {
    out << "ablate merge " << m.drop << " into " << m.keep << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Validation.

namespace {

constexpr std::size_t kDerivableCap = 20000;

class Derivability {
 public:
  explicit Derivability(const Grammar& g) : g_(g) {}

  void Run() {
    for (const auto& [tag, cats] : g_.lexicon) {
      for (const auto& c : cats) Add(c);
    }
    for (const auto& [key, cats] : g_.word_lexicon) {
      for (const auto& c : cats) Add(c);
    }
    for (const auto& m : g_.punct_table.marks()) Add(g_.punct_category(m));
    used_.assign(g_.rules.size(), false);
    bool changed = true;
    while (changed && !truncated_) {
      changed = false;
      for (std::size_t r = 0; r < g_.rules.size() && !truncated_; ++r) {
        std::vector<Category> mothers;
        Match(g_.rules[r], 0, BindingEnv(), mothers);
        if (!mothers.empty()) used_[r] = true;
        for (auto& m : mothers) changed |= Add(m);
      }
    }
  }

  bool truncated() const { return truncated_; }
  bool used(std::size_t rule) const { return used_[rule]; }
  bool derivable(const std::string& cat) const {
    return by_cat_.count(cat) > 0;
  }

 private:
  bool Add(const Category& c) {
    Category k = canonicalize(c);
    auto& bucket = by_cat_[k.cat()];
    if (std::find(bucket.begin(), bucket.end(), k) != bucket.end()) {
      return false;
    }
    bucket.push_back(std::move(k));
    if (++total_ > kDerivableCap) truncated_ = true;
    return true;
  }

  void Match(const RuleTemplate& rule, std::size_t i, const BindingEnv& env,
             std::vector<Category>& out) {
    if (i == rule.daughters.size()) {
      out.push_back(resolve(rule.mother, env));
      return;
    }
    auto it = by_cat_.find(rule.daughters[i].category.cat());
    if (it == by_cat_.end()) return;
    // Copy: Add() may grow the bucket while we iterate in a later round.
    const std::vector<Category> candidates = it->second;
    std::string suffix = "#" + std::to_string(i);
    for (const auto& c : candidates) {
      auto next = unify_category(rule.daughters[i].category,
                                 rename_vars(c, suffix), env);
      if (next) Match(rule, i + 1, *next, out);
      if (out.size() > kDerivableCap) return;
    }
  }

  const Grammar& g_;
  std::map<std::string, std::vector<Category>> by_cat_;
  std::vector<bool> used_;
  std::size_t total_ = 0;
  bool truncated_ = false;
};

}  // namespace

std::vector<Diagnostic> validate_grammar(
    const Grammar& g, const std::set<std::string>& corpus_tags) {
  std::vector<Diagnostic> out;
  for (const auto& tag : corpus_tags) {
    if (g.punct_table.by_tag(tag) == nullptr && g.lexicon.count(tag) == 0) {
      out.push_back({Diagnostic::Kind::kMissingTag,
                     "tag '" + tag + "' has no lexicon entry"});
    }
  }

  Derivability d(g);
  d.Run();
  if (d.truncated()) {
    out.push_back({Diagnostic::Kind::kTruncated,
                   "derivability analysis stopped after " +
                       std::to_string(kDerivableCap) + " categories"});
    return out;
  }
  std::set<std::string> underivable;
  for (std::size_t r = 0; r < g.rules.size(); ++r) {
    const RuleTemplate& rule = g.rules[r];
    for (const auto& dt : rule.daughters) {
      if (!d.derivable(dt.category.cat())) underivable.insert(dt.category.cat());
    }
    if (!d.used(r)) {
      out.push_back({Diagnostic::Kind::kDeadRule,
                     "rule " + rule.id + " can never apply"});
    }
  }
  for (const auto& cat : underivable) {
    out.push_back({Diagnostic::Kind::kUnderivable,
                   "category '" + cat + "' is never derived"});
  }

  // Top-down reachability over category symbols.
  std::set<std::string> reachable;
  std::vector<std::string> agenda;
  for (const auto& t : g.tops) {
    if (reachable.insert(t.cat()).second) agenda.push_back(t.cat());
  }
  while (!agenda.empty()) {
    std::string cat = agenda.back();
    agenda.pop_back();
    for (const auto& rule : g.rules) {
      if (rule.mother.cat() != cat) continue;
      for (const auto& dt : rule.daughters) {
        if (reachable.insert(dt.category.cat()).second) {
          agenda.push_back(dt.category.cat());
        }
      }
    }
  }
  std::set<std::string> lexical;
  for (const auto& [tag, cats] : g.lexicon) {
    for (const auto& c : cats) lexical.insert(c.cat());
  }
  for (const auto& [key, cats] : g.word_lexicon) {
    for (const auto& c : cats) lexical.insert(c.cat());
  }
  for (const auto& rule : g.rules) lexical.insert(rule.mother.cat());
  for (const auto& cat : lexical) {
    if (!reachable.count(cat)) {
      out.push_back({Diagnostic::Kind::kUnreachable,
                     "category '" + cat + "' is unreachable from the top"});
    }
  }
  return out;
}

}  // namespace punct
