// Tagged-sentence corpora in the Spoken English Corpus style:
//
//   Their_APP$ meeting_NN1 involves_VVZ a_AT1 kind_NN1 ... fs_FS
//
// one sentence per line, optionally prefixed by "<id>\t". The tag is the
// text after the last underscore.

#ifndef PUNCT_CORPUS_HPP_
#define PUNCT_CORPUS_HPP_

#include <cstddef>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace punct {

struct Token {
  std::string word;
  std::string tag;
  bool is_punct = false;

  std::string str() const { return word + "_" + tag; }
  friend bool operator==(const Token&, const Token&) = default;
};

struct TaggedSentence {
  std::string id;
  std::vector<Token> tokens;

  std::size_t word_count() const;
  std::size_t punct_count() const;

  friend bool operator==(const TaggedSentence&, const TaggedSentence&) =
      default;
};

struct Corpus {
  std::vector<TaggedSentence> sentences;
  // Non-fatal load diagnostics (e.g. a sentence without final punctuation).
  std::vector<std::string> warnings;

  const TaggedSentence* find(std::string_view id) const;
};

// Parses whitespace-separated word_TAG pairs. Throws DataError on an empty
// line or a malformed pair; the error column is the 1-based offset of the
// offending pair.
TaggedSentence parse_tagged_line(std::string_view line,
                                 const std::set<std::string>& punct_tags);

// Canonical single-space rendering (without the id).
std::string serialize(const TaggedSentence& s);

// Removes punctuation tokens and suffixes the id with "-nopunct". Throws
// DataError if nothing is left. Applied to an already-stripped sentence
// it only leaves the id alone.
TaggedSentence strip_punct(const TaggedSentence& s);

// Reads a corpus file. '#' lines and blank lines are skipped; sentences
// without an explicit id are named "s<n>" by their 1-based position among
// sentences. Duplicate ids are an error.
Corpus read_corpus(std::istream& in, const std::set<std::string>& punct_tags);
Corpus load_corpus(const std::string& path,
                   const std::set<std::string>& punct_tags);

// Writes "<id>\t<tokens>" lines.
std::string write_corpus(const Corpus& corpus);

struct SentenceStats {
  std::string id;
  std::size_t words = 0;
  std::size_t punct = 0;
};

struct CountSummary {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

struct CorpusStats {
  std::vector<SentenceStats> rows;
  std::optional<CountSummary> words;  // absent for an empty corpus
  std::optional<CountSummary> punct;
};

CorpusStats corpus_stats(const Corpus& corpus);

// TSV table: one row per sentence, then "# words min max mean" style
// summary lines with means to one decimal.
std::string render_stats(const CorpusStats& stats);

}  // namespace punct

#endif  // PUNCT_CORPUS_HPP_
