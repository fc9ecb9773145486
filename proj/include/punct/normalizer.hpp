// Surface rewrite passes for punctuation interaction: point, bracket and
// graphic absorption, and quote transposition.
//
// Passes only delete or move marks; words are never touched. Each pass is
// run to a fixpoint, so applying it twice is the same as applying it once.

#ifndef PUNCT_NORMALIZER_HPP_
#define PUNCT_NORMALIZER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "punct/corpus.hpp"
#include "punct/punct_table.hpp"

namespace punct {

struct StreamItem {
  Token token;
  std::optional<PunctMark> mark;  // set for punctuation

  bool is_mark() const { return mark.has_value(); }
  friend bool operator==(const StreamItem&, const StreamItem&) = default;
};

struct MarkStream {
  std::vector<StreamItem> items;

  friend bool operator==(const MarkStream&, const MarkStream&) = default;
};

MarkStream to_stream(const TaggedSentence& s, const PunctTable& table);
TaggedSentence to_sentence(const MarkStream& stream, std::string id);

// Convenience constructors for tests and tools.
StreamItem word_item(std::string word, std::string tag = "NN1");
StreamItem mark_item(const PunctMark& mark);

// In each maximal run of adjacent point marks only the strongest survives;
// ties keep the leftmost.
MarkStream point_absorption(const MarkStream& s);

// Commas and dashes directly before a closing bracket or quote are dropped.
MarkStream bracket_absorption(const MarkStream& s);

enum class QuoteDirection { kApply, kInvert };

// kApply moves point marks from just after a closing quote to just before
// it; kInvert moves them back out.
MarkStream quote_transposition(const MarkStream& s, QuoteDirection direction);

// A period directly after a word ending in '.' is dropped.
MarkStream graphic_absorption(const MarkStream& s);

// Pass names: point, bracket, graphic, quote-apply, quote-invert.
// Throws Error on an unknown name.
MarkStream normalize(const MarkStream& s,
                     const std::vector<std::string>& passes);

const std::vector<std::string>& default_generation_passes();
const std::vector<std::string>& default_analysis_passes();

// Comma-separated list; empty text yields an empty list.
std::vector<std::string> parse_pass_list(std::string_view text);

}  // namespace punct

#endif  // PUNCT_NORMALIZER_HPP_
