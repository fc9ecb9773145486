#include "oracle.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <utility>

#include "punct/error.hpp"

namespace oracle {

using punct::BindingEnv;
using punct::Category;
using punct::Grammar;
using punct::ParseTree;
using punct::RuleTemplate;

namespace {

struct Item {
  Category cat;
  std::string sig;
  // Categories on the unary spine below this item, same span.
  std::vector<std::string> spine;
};

using Items = std::vector<Item>;

class Enumerator {
 public:
  Enumerator(const punct::TaggedSentence& s, const Grammar& g,
             std::size_t cap)
      : s_(s), g_(g), cap_(cap) {}

  std::vector<std::string> Run() {
    std::vector<std::string> out;
    const std::size_t n = s_.tokens.size();
    if (n == 0) return out;
    for (const Item& it : Span(0, n)) {
      Category renamed = punct::rename_vars(it.cat, "@t");
      for (const auto& top : g_.tops) {
        if (punct::unify_category(top, renamed, BindingEnv())) {
          out.push_back(it.sig);
          break;
        }
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const Items& Span(std::size_t i, std::size_t j) {
    auto key = std::make_pair(i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Items items;
    if (j == i + 1) {
      Lexical(i, items);
    } else {
      for (const auto& r : g_.rules) {
        if (r.daughters.size() < 2 || r.daughters.size() > j - i) continue;
        std::vector<const Item*> picked;
        Split(r, 0, i, j, BindingEnv(), picked, items);
      }
    }
    Unary(items);
    total_ += items.size();
    if (total_ > cap_) throw punct::ResourceExhausted("oracle cap reached");
    return memo_.emplace(key, std::move(items)).first->second;
  }

  void Lexical(std::size_t i, Items& items) {
    const punct::Token& tok = s_.tokens[i];
    if (const punct::PunctMark* m = g_.punct_table.by_tag(tok.tag)) {
      Category c = g_.punct_category(*m);
      items.push_back({c, Leaf(c, "punc:" + m->symbol, tok), {}});
      return;
    }
    std::string key = tok.word + "_" + tok.tag;
    auto it = g_.word_lexicon.find(key);
    if (it == g_.word_lexicon.end()) {
      key = tok.tag;
      it = g_.lexicon.find(key);
      if (it == g_.lexicon.end()) {
        throw punct::DataError("oracle: unknown tag " + tok.tag);
      }
    }
    for (std::size_t k = 0; k < it->second.size(); ++k) {
      const Category& c = it->second[k];
      items.push_back(
          {c, Leaf(c, "lex:" + key + "#" + std::to_string(k), tok), {}});
    }
  }

  static std::string Leaf(const Category& c, const std::string& id,
                          const punct::Token& tok) {
    return "(" + c.str() + " " + id + " " + tok.word + "_" + tok.tag + ")";
  }

  static std::string Node(const Category& c, const std::string& id,
                          const std::vector<const Item*>& kids) {
    std::string out = "(" + c.str() + " " + id;
    for (const Item* k : kids) out += " " + k->sig;
    return out + ")";
  }

  void Split(const RuleTemplate& r, std::size_t d, std::size_t from,
             std::size_t to, const BindingEnv& env,
             std::vector<const Item*>& picked, Items& out) {
    const std::size_t k = r.daughters.size();
    if (d == k) {
      Category mother = punct::canonicalize(punct::resolve(r.mother, env));
      out.push_back({mother, Node(mother, r.id, picked), {}});
      return;
    }
    const std::size_t left = k - d - 1;
    std::size_t first = d + 1 == k ? to : from + 1;
    for (std::size_t mid = first; mid + left <= to; ++mid) {
      // std::map keeps references valid while Span() inserts.
      const Items& part = Span(from, mid);
      const std::string suffix = "@" + std::to_string(d);
      for (const Item& it : part) {
        auto next = punct::unify_category(
            r.daughters[d].category, punct::rename_vars(it.cat, suffix), env);
        if (!next) continue;
        picked.push_back(&it);
        Split(r, d + 1, mid, to, *next, picked, out);
        picked.pop_back();
      }
    }
  }

  void Unary(Items& items) {
    for (std::size_t a = 0; a < items.size(); ++a) {
      for (const auto& r : g_.rules) {
        if (r.daughters.size() != 1) continue;
        Item child = items[a];
        auto env = punct::unify_category(r.daughters[0].category,
                                         punct::rename_vars(child.cat, "@0"),
                                         BindingEnv());
        if (!env) continue;
        Category mother = punct::canonicalize(punct::resolve(r.mother, *env));
        std::string m = mother.str();
        std::vector<std::string> spine = child.spine;
        spine.push_back(child.cat.str());
        if (std::find(spine.begin(), spine.end(), m) != spine.end()) continue;
        items.push_back({mother, Node(mother, r.id, {&child}), spine});
      }
    }
  }

  const punct::TaggedSentence& s_;
  const Grammar& g_;
  std::size_t cap_;
  std::size_t total_ = 0;
  std::map<std::pair<std::size_t, std::size_t>, Items> memo_;
};

using TreeList = std::vector<std::string>;

}  // namespace

std::string signature(const ParseTree& tree) {
  std::string out = "(" + tree.category.str() + " " + tree.rule_id;
  if (tree.token) out += " " + tree.token->word + "_" + tree.token->tag;
  for (const auto& c : tree.children) out += " " + signature(c);
  return out + ")";
}

std::vector<std::string> exhaustive_parses(const punct::TaggedSentence& s,
                                           const Grammar& g, std::size_t cap) {
  return Enumerator(s, g, cap).Run();
}

std::vector<std::string> forest_trees(const punct::PackedForest& forest,
                                      std::size_t cap) {
  const auto& nodes = forest.nodes();
  std::vector<std::unique_ptr<TreeList>> memo(nodes.size());
  std::vector<char> active(nodes.size(), 0);
  // 1 if the node yields at least one tree; alternatives with a barren
  // child are skipped so that no list outgrows the root lists.
  std::vector<int> live(nodes.size(), -1);
  auto alive = [&](auto&& self, std::size_t i) -> bool {
    if (live[i] >= 0) return live[i] == 1;
    live[i] = 0;
    bool any = false;
    for (const auto& alt : nodes[i].alternatives) {
      bool all = true;
      for (std::size_t c : alt.children) all = all && self(self, c);
      any = any || all;
    }
    live[i] = any ? 1 : 0;
    return any;
  };
  auto visit = [&](auto&& self, std::size_t i) -> const TreeList& {
    if (memo[i]) return *memo[i];
    if (active[i]) throw punct::Error("forest cycle");
    active[i] = 1;
    auto out = std::make_unique<TreeList>();
    const auto& n = nodes[i];
    for (const auto& alt : n.alternatives) {
      bool barren = false;
      for (std::size_t c : alt.children) barren = barren || !alive(alive, c);
      if (barren) continue;
      std::string head = "(" + n.category.str() + " " + alt.rule_id;
      if (alt.token) {
        const auto& tok = forest.tokens()[*alt.token];
        head += " " + tok.word + "_" + tok.tag;
      }
      TreeList partial{head};
      for (std::size_t c : alt.children) {
        const TreeList& kids = self(self, c);
        TreeList next;
        for (const auto& p : partial) {
          for (const auto& k : kids) {
            next.push_back(p + " " + k);
            if (next.size() > cap) {
              throw punct::ResourceExhausted("forest list cap reached");
            }
          }
        }
        partial = std::move(next);
        if (partial.empty()) break;
      }
      for (auto& p : partial) out->push_back(p + ")");
      if (out->size() > cap) {
        throw punct::ResourceExhausted("forest list cap reached");
      }
    }
    active[i] = 0;
    memo[i] = std::move(out);
    return *memo[i];
  };
  TreeList all;
  for (std::size_t r : forest.roots()) {
    const TreeList& t = visit(visit, r);
    all.insert(all.end(), t.begin(), t.end());
    if (all.size() > cap) {
      throw punct::ResourceExhausted("forest list cap reached");
    }
  }
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

void Leaves(const ParseTree& t, std::vector<punct::Token>& out) {
  if (t.token) out.push_back(*t.token);
  for (const auto& c : t.children) Leaves(c, out);
}

std::string CheckNode(const ParseTree& t, const Grammar& g) {
  const std::string where =
      t.rule_id + "@" + std::to_string(t.start) + "-" + std::to_string(t.end);
  if (t.token) {
    if (!t.children.empty()) return where + ": leaf with children";
    if (t.end != t.start + 1) return where + ": leaf spans more than a token";
    for (const auto& c : g.lexical_categories(*t.token)) {
      if (c == t.category) return "";
    }
    return where + ": category not in lexicon";
  }
  const RuleTemplate* r = g.find_rule(t.rule_id);
  if (r == nullptr) return where + ": unknown rule";
  if (r->daughters.size() != t.children.size()) {
    return where + ": wrong number of children";
  }
  std::size_t pos = t.start;
  BindingEnv env;
  for (std::size_t d = 0; d < t.children.size(); ++d) {
    const ParseTree& c = t.children[d];
    if (c.start != pos || c.end <= c.start) return where + ": children gap";
    pos = c.end;
    auto next = punct::unify_category(
        r->daughters[d].category,
        punct::rename_vars(c.category, "@" + std::to_string(d)), env);
    if (!next) return where + ": daughter " + std::to_string(d) + " clash";
    env = *next;
  }
  if (pos != t.end) return where + ": children do not reach the end";
  if (punct::canonicalize(punct::resolve(r->mother, env)) != t.category) {
    return where + ": mother mismatch";
  }
  for (const auto& c : t.children) {
    std::string e = CheckNode(c, g);
    if (!e.empty()) return e;
  }
  return "";
}

punct::FeatureValue Stop(const ParseTree& t) {
  const std::string_view feature =
      t.category.cat() == punct::kPunctCat ? punct::kMarkFeature
                                           : punct::kStopFeature;
  const punct::FeatureValue* v = t.category.get(feature);
  return v ? *v : punct::FeatureValue::Unset();
}

void StopWalk(const ParseTree& t, const Grammar& g,
              std::vector<std::string>& out) {
  if (!t.children.empty()) {
    const RuleTemplate* r = g.find_rule(t.rule_id);
    if (r != nullptr && !r->explicit_stop &&
        Stop(t) != Stop(t.children.back())) {
      out.push_back(t.rule_id + "@" + std::to_string(t.start) + "-" +
                    std::to_string(t.end));
    }
  }
  for (const auto& c : t.children) StopWalk(c, g, out);
}

bool IsPointMark(const punct::StreamItem& item) {
  return item.is_mark() && item.mark->cls == punct::MarkClass::kPoint;
}

}  // namespace

std::string check_tree(const ParseTree& tree, const Grammar& g,
                       const std::vector<punct::Token>& tokens) {
  std::vector<punct::Token> leaves;
  Leaves(tree, leaves);
  if (leaves.size() != tokens.size()) return "leaf count differs";
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (leaves[i].word != tokens[i].word || leaves[i].tag != tokens[i].tag) {
      return "leaf " + std::to_string(i) + " differs";
    }
  }
  if (tree.start != 0 || tree.end != tokens.size()) return "root span";
  return CheckNode(tree, g);
}

std::vector<std::string> stop_violations(const ParseTree& tree,
                                         const Grammar& g) {
  std::vector<std::string> out;
  StopWalk(tree, g, out);
  return out;
}

punct::MarkStream pairwise_absorption(const punct::MarkStream& s) {
  punct::MarkStream out = s;
  auto& items = out.items;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
      if (!IsPointMark(items[i]) || !IsPointMark(items[i + 1])) continue;
      std::size_t drop =
          items[i + 1].mark->strength > items[i].mark->strength ? i : i + 1;
      items.erase(items.begin() + static_cast<std::ptrdiff_t>(drop));
      changed = true;
      break;
    }
  }
  return out;
}

punct::MarkStream random_stream(std::mt19937& rng,
                                const punct::PunctTable& table,
                                std::size_t max_len) {
  static const char* kWords[] = {"John", "friend", "C.I.A.", "etc", "you",
                                 "F.B.I.", "teacher"};
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> word(0, std::size(kWords) - 1);
  std::uniform_int_distribution<std::size_t> mark(0, table.marks().size() - 1);
  std::bernoulli_distribution is_mark(0.55);
  punct::MarkStream out;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_mark(rng)) {
      out.items.push_back(punct::mark_item(table.marks()[mark(rng)]));
    } else {
      out.items.push_back(punct::word_item(kWords[word(rng)]));
    }
  }
  return out;
}

namespace {

bool IsCloseQuote(const punct::StreamItem& item) {
  return item.is_mark() && item.mark->cls == punct::MarkClass::kQuote &&
         item.mark->side == punct::MarkSide::kClose;
}

}  // namespace

bool quote_safe(const punct::MarkStream& s) {
  const auto& items = s.items;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    if (IsPointMark(items[i]) && IsCloseQuote(items[i + 1])) return false;
    if (!IsCloseQuote(items[i])) continue;
    std::size_t j = i + 1;
    while (j < items.size() && IsPointMark(items[j])) ++j;
    if (j > i + 1 && j < items.size() && IsCloseQuote(items[j])) return false;
  }
  return true;
}

std::vector<punct::Token> words_of(const punct::MarkStream& s) {
  std::vector<punct::Token> out;
  for (const auto& item : s.items) {
    if (!item.is_mark()) out.push_back(item.token);
  }
  return out;
}

}  // namespace oracle
