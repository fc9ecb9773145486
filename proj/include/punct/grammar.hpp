// Tag grammars with punctuation: representation, loader and dumper.
//
// The loader accepts schematic rules (optional punctuation daughters,
// value disjunctions) and expands them into plain unification rules. When
// the grammar declares a `st` (stop) feature, every category carries one:
// missing values default to unset, and unless a rule mentions the mother's
// stop value explicitly the mother inherits the stop value of its
// rightmost daughter.
//
// DSL summary (one directive per line, '#' starts a comment):
//
//   feature st { c, d, sc, co, f, q, x, op, cp, oq, cq }
//   punc c tag C strength 1 class point
//   punc op tag OP strength 1 class bracket side open
//   lex NN1 n0
//   lex bad-tempered_NN1 adj            # word-specific override
//   rule [id:] np[st=S] -> np[st=c] np[st=-] punc[mark=S]
//   rule s -> np (c) vp                 # optional comma
//   rule s[co=A|B] -> s[co=A, st=sc] s[co=B]
//   top s[st=f|q|x]
//   ablate strip st cm co
//   ablate merge n0_comp into np_appos
//
// Values: `-` is unset, identifiers starting with an upper-case letter are
// variables, `a|b` over atoms yields one rule per alternative, and `A|B`
// over variables enumerates the variables and takes the join (the
// later-declared value wins, unset is lowest).

#ifndef PUNCT_GRAMMAR_HPP_
#define PUNCT_GRAMMAR_HPP_

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "punct/corpus.hpp"
#include "punct/feature.hpp"
#include "punct/punct_table.hpp"

namespace punct {

inline constexpr std::string_view kStopFeature = "st";
inline constexpr std::string_view kMarkFeature = "mark";
inline constexpr std::string_view kPunctCat = "punc";
// Variable introduced when linking a mother's stop value to its rightmost
// daughter. Not expressible in the DSL, so it never clashes with a rule's
// own variables.
inline constexpr std::string_view kInheritVar = "_S";

struct DaughterSpec {
  Category category;
  bool optional = false;
  bool is_punct_terminal = false;

  friend bool operator==(const DaughterSpec&, const DaughterSpec&) = default;
};

struct RuleTemplate {
  std::string id;
  Category mother;
  std::vector<DaughterSpec> daughters;
  bool explicit_stop = false;

  std::string str() const;  // "id: mother -> d1 d2 ..."
  friend bool operator==(const RuleTemplate&, const RuleTemplate&) = default;
};

struct FeatureDecl {
  std::string name;
  std::vector<std::string> values;  // declared atoms; unset is implicit

  friend bool operator==(const FeatureDecl&, const FeatureDecl&) = default;
};

struct MergeEntry {
  std::string drop;  // source rule id whose ablated image is removed
  std::string keep;  // source rule id that covers its function

  friend bool operator==(const MergeEntry&, const MergeEntry&) = default;
};

struct Grammar {
  std::vector<RuleTemplate> rules;
  // corpus tag -> categories
  std::map<std::string, std::vector<Category>> lexicon;
  // "word_TAG" -> categories; replaces the tag entry for that word
  std::map<std::string, std::vector<Category>> word_lexicon;
  PunctTable punct_table;
  std::vector<FeatureDecl> feature_decls;
  std::vector<Category> tops;
  std::vector<std::string> ablation_features;
  std::vector<MergeEntry> merges;

  const FeatureDecl* decl(std::string_view feature) const;
  bool has_stop() const { return decl(kStopFeature) != nullptr; }

  // Categories for a token: the punctuation category for punctuation
  // tags, else a word-specific override, else the tag entry. Empty if the
  // token is unknown.
  std::vector<Category> lexical_categories(const Token& token) const;

  // Category assigned to punctuation tokens of `mark`.
  Category punct_category(const PunctMark& mark) const;

  const RuleTemplate* find_rule(std::string_view id) const;

  friend bool operator==(const Grammar&, const Grammar&) = default;
};

// Throws DataError carrying line/column on syntax errors, undeclared
// features or values, variables free in a mother, and duplicate rule ids.
Grammar load_grammar(std::string_view source);
Grammar load_grammar_file(const std::string& path);

// Canonical DSL text; load_grammar(dump_grammar(g)) == g.
std::string dump_grammar(const Grammar& g);

// 2^k variants for k optional punctuation daughters. When the mark is
// present the preceding daughter is required to be stopped by it; when
// absent the preceding daughter must be unstopped. Variants with the mark
// come first. Ids are left unchanged.
std::vector<RuleTemplate> expand_optionals(const RuleTemplate& rule);

// Links the mother's stop value to the rightmost daughter unless the rule
// sets it explicitly. A rightmost punctuation terminal passes its mark up
// instead.
RuleTemplate apply_stop_inheritance(const RuleTemplate& rule);

struct Diagnostic {
  enum class Kind { kMissingTag, kDeadRule, kUnderivable, kUnreachable,
                    kTruncated };
  Kind kind;
  std::string message;
};

// Static checks. `corpus_tags` lists tags that some corpus uses; each one
// must have a lexicon or punctuation entry.
std::vector<Diagnostic> validate_grammar(
    const Grammar& g, const std::set<std::string>& corpus_tags = {});

}  // namespace punct

#endif  // PUNCT_GRAMMAR_HPP_
