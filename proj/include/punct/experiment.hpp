// Punctuated vs unpunctuated comparison: grammar ablation and the harness
// that parses a corpus under both grammars.

#ifndef PUNCT_EXPERIMENT_HPP_
#define PUNCT_EXPERIMENT_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "punct/chart.hpp"
#include "punct/corpus.hpp"
#include "punct/grammar.hpp"

namespace punct {

using Rational = boost::multiprecision::cpp_rational;

enum class AblationLevel { kStrict, kTrimmed };

std::string_view to_string(AblationLevel level);
std::optional<AblationLevel> parse_ablation_level(std::string_view text);

struct AblationConfig {
  AblationLevel level = AblationLevel::kTrimmed;
  bool strip_input_punct = true;
};

// strict: strip the grammar's ablation features everywhere, delete
// punctuation daughters, drop rules left without daughters and unary
// rules that became X -> X, then dedupe.
// trimmed: as strict, but rules named on the left of an `ablate merge`
// entry are dropped before deduping.
Grammar ablate_grammar(const Grammar& g, const AblationConfig& cfg);

// Keeps the first of each group of rules that are equal up to variable
// renaming. Ids and relative order of the survivors are unchanged.
std::vector<RuleTemplate> dedupe_rules(const std::vector<RuleTemplate>& rules);

// Alpha-normal rendering used by dedupe_rules (ids are ignored).
std::string canonical_rule(const RuleTemplate& rule);

enum class CountMode { kExact, kAuto };

std::string_view to_string(CountMode mode);
std::optional<CountMode> parse_count_mode(std::string_view text);

struct SentenceResult {
  std::string id;
  std::size_t words = 0;
  std::size_t punct_marks = 0;
  std::optional<ParseCount> punct_parses;
  std::optional<ParseCount> unpunct_parses;
  std::optional<Rational> ratio;  // unpunct / punct, both counts > 0
  // Any of: punct_failure, unpunct_failure, punct_exhausted,
  // unpunct_exhausted.
  std::vector<std::string> flags;

  friend bool operator==(const SentenceResult&, const SentenceResult&) =
      default;
};

struct ReportAggregates {
  BigInt min_punct = 0;
  BigInt max_punct = 0;
  Rational mean_punct = 0;
  // Mean after dropping the k smallest and k largest counts; absent when
  // fewer than 2k+1 sentences have a count.
  std::optional<Rational> trimmed_mean_punct;
  std::size_t trim = 4;
  std::size_t ratio_at_least_100 = 0;

  friend bool operator==(const ReportAggregates&, const ReportAggregates&) =
      default;
};

struct ComparisonReport {
  AblationLevel level = AblationLevel::kTrimmed;
  std::vector<SentenceResult> rows;        // natural order by id
  std::optional<ReportAggregates> aggregates;  // absent if no counts

  friend bool operator==(const ComparisonReport&, const ComparisonReport&) =
      default;
};

struct ComparisonOptions {
  AblationConfig ablation;
  CountMode count_mode = CountMode::kAuto;
  ParseOptions parse;
  // Budget for the backbone fallback in auto mode. The backbone parse
  // never needs less work than the exact one, so it gets its own limit.
  std::uint64_t estimate_work_limit = kDefaultWorkLimit;
  unsigned jobs = 1;
  std::size_t trim = 4;
};

ComparisonReport run_comparison(const Corpus& corpus, const Grammar& g,
                                const ComparisonOptions& options = {});

// Recomputes aggregates from rows.
std::optional<ReportAggregates> aggregate(
    const std::vector<SentenceResult>& rows, std::size_t trim);

// "tsv" or "json"; throws Error otherwise.
std::string render_report(const ComparisonReport& report,
                          std::string_view format);
ComparisonReport parse_report_json(std::string_view text);

// Fixed-point rendering with `places` decimals, rounding half up.
std::string format_decimal(const Rational& value, int places = 2);

// "s2" < "s10": digit runs compare numerically.
bool natural_less(std::string_view a, std::string_view b);

}  // namespace punct

#endif  // PUNCT_EXPERIMENT_HPP_
