#include "punct/chart.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "punct/error.hpp"

namespace punct {

std::optional<std::size_t> PackedForest::find(const NodeKey& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view to_string(ParseCount::Kind kind) {
  return kind == ParseCount::Kind::kExact ? "exact" : "upper_bound";
}

class ChartBuilder {
 public:
  ChartBuilder(const TaggedSentence& sentence, const Grammar& g,
               const ParseOptions& options)
      : g_(g), options_(options) {
    forest_.tokens_ = sentence.tokens;
    n_ = sentence.tokens.size();
    cells_.assign(n_ + 1, std::vector<Cell>(n_ + 1));
    for (const auto& r : g.rules) {
      if (r.daughters.size() == 1) {
        unary_[r.daughters[0].category.cat()].push_back(&r);
      } else {
        nary_.push_back(&r);
      }
    }
  }

  PackedForest Build() {
    for (std::size_t len = 1; len <= n_; ++len) {
      for (std::size_t start = 0; start + len <= n_; ++start) {
        std::size_t end = start + len;
        if (len == 1) {
          Lexical(start);
        } else {
          for (const RuleTemplate* r : nary_) {
            if (r->daughters.size() > len) continue;
            children_.clear();
            Match(*r, 0, start, end, BindingEnv());
          }
        }
        UnaryClosure(start, end);
      }
    }
    if (n_ > 0) {
      for (const auto& [sym, ids] : cells_[0][n_]) {
        for (std::size_t id : ids) {
          const Category renamed = Renamed(id, 0);
          for (const auto& top : g_.tops) {
            Tick();
            if (unify_category(top, renamed, BindingEnv())) {
              forest_.roots_.push_back(id);
              break;
            }
          }
        }
      }
      std::sort(forest_.roots_.begin(), forest_.roots_.end(),
                [&](std::size_t a, std::size_t b) {
                  return forest_.nodes_[a].key < forest_.nodes_[b].key;
                });
    }
    return std::move(forest_);
  }

 private:
  using Cell = std::map<std::string, std::vector<std::size_t>>;

  void Tick() {
    if (++forest_.work_ > options_.work_limit) {
      throw ResourceExhausted("work limit of " +
                              std::to_string(options_.work_limit) +
                              " unification attempts exceeded");
    }
  }

  Category Renamed(std::size_t node, std::size_t position) const {
    const Category& c = forest_.nodes_[node].category;
    if (c.is_ground()) return c;
    return rename_vars(c, "#" + std::to_string(position));
  }

  void Lexical(std::size_t i) {
    const Token& tok = forest_.tokens_[i];
    if (const PunctMark* mark = g_.punct_table.by_tag(tok.tag)) {
      Add(i, i + 1, g_.punct_category(*mark), {"punc:" + mark->symbol, {}, i},
          false);
      return;
    }
    std::string key = tok.str();
    const std::vector<Category>* cats = nullptr;
    if (auto it = g_.word_lexicon.find(key); it != g_.word_lexicon.end()) {
      cats = &it->second;
    } else if (auto jt = g_.lexicon.find(tok.tag); jt != g_.lexicon.end()) {
      cats = &jt->second;
      key = tok.tag;
    }
    if (cats == nullptr || cats->empty()) {
      throw DataError("unknown tag '" + tok.tag + "' at token " +
                      std::to_string(i + 1) + " ('" + tok.str() + "')");
    }
    for (std::size_t k = 0; k < cats->size(); ++k) {
      Add(i, i + 1, (*cats)[k],
          {"lex:" + key + "#" + std::to_string(k), {}, i}, false);
    }
  }

  void Match(const RuleTemplate& r, std::size_t d, std::size_t pos,
             std::size_t end, const BindingEnv& env) {
    const std::size_t k = r.daughters.size();
    if (d == k) {
      Category mother = canonicalize(resolve(r.mother, env));
      Add(children_.empty() ? pos : forest_.nodes_[children_.front()].key.start,
          end, mother, {r.id, children_, std::nullopt}, false);
      return;
    }
    const Category& want = r.daughters[d].category;
    const std::size_t remaining = k - d - 1;
    std::size_t lo = pos + 1;
    std::size_t hi = end - remaining;
    if (d + 1 == k) lo = end;
    for (std::size_t mid = lo; mid <= hi; ++mid) {
      const Cell& cell = cells_[pos][mid];
      auto it = cell.find(want.cat());
      if (it == cell.end()) continue;
      // The cell for a shorter span is complete, so iterating by index is
      // safe even though Add() may touch other cells.
      const std::vector<std::size_t>& ids = it->second;
      for (std::size_t j = 0; j < ids.size(); ++j) {
        std::size_t id = ids[j];
        Tick();
        auto next = unify_category(want, Renamed(id, d), env);
        if (!next) continue;
        children_.push_back(id);
        Match(r, d + 1, mid, end, *next);
        children_.pop_back();
      }
    }
  }

  void UnaryClosure(std::size_t start, std::size_t end) {
    std::vector<std::size_t> agenda;
    for (const auto& [sym, ids] : cells_[start][end]) {
      agenda.insert(agenda.end(), ids.begin(), ids.end());
    }
    std::sort(agenda.begin(), agenda.end());
    for (std::size_t a = 0; a < agenda.size(); ++a) {
      std::size_t child = agenda[a];
      auto it = unary_.find(forest_.nodes_[child].category.cat());
      if (it == unary_.end()) continue;
      for (const RuleTemplate* r : it->second) {
        Tick();
        auto env = unify_category(r->daughters[0].category, Renamed(child, 0),
                                  BindingEnv());
        if (!env) continue;
        Category mother = canonicalize(resolve(r->mother, *env));
        auto added = Add(start, end, mother, {r->id, {child}, std::nullopt},
                         true);
        if (added && *added) agenda.push_back(forest_.nodes_.size() - 1);
      }
    }
  }

  // True if `target` is reachable from `from` through same-span children.
  bool Reaches(std::size_t from, std::size_t target) const {
    std::vector<std::size_t> stack{from};
    std::vector<bool> seen(forest_.nodes_.size(), false);
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      if (cur == target) return true;
      if (seen[cur]) continue;
      seen[cur] = true;
      const ForestNode& node = forest_.nodes_[cur];
      for (const auto& alt : node.alternatives) {
        for (std::size_t c : alt.children) {
          const NodeKey& ck = forest_.nodes_[c].key;
          if (ck.start == node.key.start && ck.end == node.key.end) {
            stack.push_back(c);
          }
        }
      }
    }
    return false;
  }

  // Returns nullopt if the derivation was rejected, true if a node was
  // created, false if an existing node gained an alternative.
  std::optional<bool> Add(std::size_t start, std::size_t end, Category cat,
                          Derivation derivation, bool unary) {
    NodeKey key{start, end, cat.str()};
    auto it = forest_.index_.find(key);
    if (it == forest_.index_.end()) {
      std::size_t id = forest_.nodes_.size();
      forest_.nodes_.push_back({key, std::move(cat), {std::move(derivation)}});
      forest_.index_.emplace(std::move(key), id);
      cells_[start][end][forest_.nodes_[id].category.cat()].push_back(id);
      return true;
    }
    ForestNode& node = forest_.nodes_[it->second];
    if (std::find(node.alternatives.begin(), node.alternatives.end(),
                  derivation) != node.alternatives.end()) {
      return std::nullopt;
    }
    if (unary && Reaches(derivation.children.front(), it->second)) {
      return std::nullopt;
    }
    forest_.nodes_[it->second].alternatives.push_back(std::move(derivation));
    return false;
  }

  const Grammar& g_;
  const ParseOptions& options_;
  std::size_t n_ = 0;
  PackedForest forest_;
  std::vector<std::vector<Cell>> cells_;
  std::unordered_map<std::string, std::vector<const RuleTemplate*>> unary_;
  std::vector<const RuleTemplate*> nary_;
  std::vector<std::size_t> children_;
};

PackedForest parse(const TaggedSentence& sentence, const Grammar& g,
                   const ParseOptions& options) {
  return ChartBuilder(sentence, g, options).Build();
}

namespace {

struct Counts {
  std::vector<BigInt> node;
  std::vector<std::vector<BigInt>> alt;
};

Counts ComputeCounts(const PackedForest& forest) {
  const auto& nodes = forest.nodes();
  Counts out;
  out.node.assign(nodes.size(), BigInt(0));
  out.alt.resize(nodes.size());
  std::vector<char> state(nodes.size(), 0);  // 0 new, 1 active, 2 done
  std::function<const BigInt&(std::size_t)> visit =
      [&](std::size_t i) -> const BigInt& {
    if (state[i] == 2) return out.node[i];
    state[i] = 1;
    BigInt total = 0;
    for (const auto& alt : nodes[i].alternatives) {
      BigInt product = 1;
      for (std::size_t c : alt.children) {
        if (state[c] == 1) throw Error("cycle in parse forest");
        product *= visit(c);
        if (product == 0) break;
      }
      out.alt[i].push_back(product);
      total += product;
    }
    out.node[i] = total;
    state[i] = 2;
    return out.node[i];
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) visit(i);
  return out;
}

ParseTree Build(const PackedForest& forest, const Counts& counts,
                std::size_t node, BigInt k) {
  const ForestNode& n = forest.node(node);
  for (std::size_t a = 0; a < n.alternatives.size(); ++a) {
    const BigInt& c = counts.alt[node][a];
    if (k >= c) {
      k -= c;
      continue;
    }
    const Derivation& alt = n.alternatives[a];
    ParseTree tree;
    tree.category = n.category;
    tree.rule_id = alt.rule_id;
    tree.start = n.key.start;
    tree.end = n.key.end;
    if (alt.token) tree.token = forest.tokens()[*alt.token];
    std::vector<BigInt> index(alt.children.size());
    for (std::size_t j = alt.children.size(); j-- > 0;) {
      const BigInt& cc = counts.node[alt.children[j]];
      index[j] = k % cc;
      k /= cc;
    }
    for (std::size_t j = 0; j < alt.children.size(); ++j) {
      tree.children.push_back(
          Build(forest, counts, alt.children[j], std::move(index[j])));
    }
    return tree;
  }
  throw Error("tree index out of range");
}

Category StripFeatures(const Category& c) { return Category(c.cat()); }

}  // namespace

std::vector<BigInt> node_counts(const PackedForest& forest) {
  return ComputeCounts(forest).node;
}

ParseCount count_exact(const PackedForest& forest) {
  ParseCount out;
  out.value = 0;
  if (forest.roots().empty()) return out;
  std::vector<BigInt> counts = node_counts(forest);
  for (std::size_t r : forest.roots()) out.value += counts[r];
  return out;
}

Grammar backbone_grammar(const Grammar& g) {
  Grammar out = g;
  out.feature_decls.clear();
  out.ablation_features.clear();
  for (auto& r : out.rules) {
    r.mother = StripFeatures(r.mother);
    for (auto& d : r.daughters) d.category = StripFeatures(d.category);
  }
  for (auto* table : {&out.lexicon, &out.word_lexicon}) {
    for (auto& [key, cats] : *table) {
      for (auto& c : cats) c = StripFeatures(c);
    }
  }
  std::vector<Category> tops;
  for (const auto& t : out.tops) {
    Category c = StripFeatures(t);
    if (std::find(tops.begin(), tops.end(), c) == tops.end()) tops.push_back(c);
  }
  out.tops = std::move(tops);
  return out;
}

ParseCount estimate_backbone(const TaggedSentence& sentence, const Grammar& g,
                             const ParseOptions& options) {
  ParseCount out = count_exact(parse(sentence, backbone_grammar(g), options));
  out.kind = ParseCount::Kind::kBackboneUpperBound;
  return out;
}

std::vector<ParseTree> unpack(const PackedForest& forest, std::size_t limit) {
  std::vector<ParseTree> out;
  if (limit == 0 || forest.roots().empty()) return out;
  Counts counts = ComputeCounts(forest);
  for (std::size_t r : forest.roots()) {
    const BigInt& c = counts.node[r];
    for (BigInt k = 0; k < c && out.size() < limit; ++k) {
      out.push_back(Build(forest, counts, r, k));
    }
    if (out.size() >= limit) break;
  }
  return out;
}

std::string bracketed(const ParseTree& tree) {
  std::string out = "(" + tree.category.str();
  if (tree.token) {
    out += ' ';
    out += tree.token->str();
  }
  for (const auto& child : tree.children) {
    out += ' ';
    out += bracketed(child);
  }
  out += ')';
  return out;
}

}  // namespace punct
