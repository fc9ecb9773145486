// Bottom-up unification chart parser with a packed forest.
//
// Nodes are keyed by (start, end, canonical category). Each node keeps its
// alternative derivations, so the number of trees can be counted without
// unpacking them. Lexical derivations carry ids of the form "lex:TAG#k"
// (or "lex:word_TAG#k" for word overrides) and "punc:<mark>".

#ifndef PUNCT_CHART_HPP_
#define PUNCT_CHART_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "punct/corpus.hpp"
#include "punct/feature.hpp"
#include "punct/grammar.hpp"

namespace punct {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultWorkLimit = 10'000'000;

struct ParseOptions {
  // Maximum number of unification attempts before giving up.
  std::uint64_t work_limit = kDefaultWorkLimit;
};

struct NodeKey {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string category;  // canonical rendering

  friend bool operator==(const NodeKey&, const NodeKey&) = default;
  friend auto operator<=>(const NodeKey&, const NodeKey&) = default;
};

struct Derivation {
  std::string rule_id;
  std::vector<std::size_t> children;  // node indices, left to right
  std::optional<std::size_t> token;   // set for lexical derivations

  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct ForestNode {
  NodeKey key;
  Category category;
  std::vector<Derivation> alternatives;
};

class PackedForest {
 public:
  const std::vector<Token>& tokens() const { return tokens_; }
  const std::vector<ForestNode>& nodes() const { return nodes_; }
  const ForestNode& node(std::size_t i) const { return nodes_[i]; }
  // Full-span nodes matching a top category, sorted by key.
  const std::vector<std::size_t>& roots() const { return roots_; }
  std::optional<std::size_t> find(const NodeKey& key) const;
  std::uint64_t work() const { return work_; }

 private:
  friend class ChartBuilder;

  std::vector<Token> tokens_;
  std::vector<ForestNode> nodes_;
  std::map<NodeKey, std::size_t> index_;
  std::vector<std::size_t> roots_;
  std::uint64_t work_ = 0;
};

// Throws DataError for a token whose tag has no lexicon entry and
// ResourceExhausted when the work limit is reached.
PackedForest parse(const TaggedSentence& sentence, const Grammar& g,
                   const ParseOptions& options = {});

struct ParseCount {
  enum class Kind { kExact, kBackboneUpperBound };
  BigInt value;
  Kind kind = Kind::kExact;

  friend bool operator==(const ParseCount&, const ParseCount&) = default;
};

std::string_view to_string(ParseCount::Kind kind);

// Number of complete trees, by a memoized sum of products over the forest.
ParseCount count_exact(const PackedForest& forest);

// Per-node tree counts (same memo count_exact uses).
std::vector<BigInt> node_counts(const PackedForest& forest);

// Same rules and lexicon with every feature removed. Rule ids and lexical
// entry order are kept, so each exact tree maps to a distinct backbone tree.
Grammar backbone_grammar(const Grammar& g);

ParseCount estimate_backbone(const TaggedSentence& sentence, const Grammar& g,
                             const ParseOptions& options = {});

struct ParseTree {
  Category category;
  std::string rule_id;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<ParseTree> children;
  std::optional<Token> token;  // lexical leaves only

  friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

// The first min(limit, total) trees. Roots in key order, then alternatives
// in order, then child combinations with the leftmost child varying
// slowest. Trees are built one at a time from their index.
std::vector<ParseTree> unpack(const PackedForest& forest, std::size_t limit);

// "(s[st=f] (np[st=-] (n0[st=-] John_NP1)) ...)"
std::string bracketed(const ParseTree& tree);

}  // namespace punct

#endif  // PUNCT_CHART_HPP_
