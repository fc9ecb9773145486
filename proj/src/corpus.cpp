#include "punct/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "punct/error.hpp"

namespace punct {

namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

std::string FormatMean(double mean) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", mean);
  return buf;
}

}  // namespace

std::size_t TaggedSentence::word_count() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(),
                    [](const Token& t) { return !t.is_punct; }));
}

std::size_t TaggedSentence::punct_count() const {
  return tokens.size() - word_count();
}

const TaggedSentence* Corpus::find(std::string_view id) const {
  for (const auto& s : sentences) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

TaggedSentence parse_tagged_line(std::string_view line,
                                 const std::set<std::string>& punct_tags) {
  TaggedSentence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && IsSpace(line[i])) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !IsSpace(line[i])) ++i;
    std::string_view pair = line.substr(start, i - start);
    std::size_t us = pair.rfind('_');
    if (us == std::string_view::npos || us == 0 || us + 1 == pair.size()) {
      throw DataError("malformed word_TAG pair '" + std::string(pair) + "'",
                      0, start + 1);
    }
    Token tok;
    tok.word = std::string(pair.substr(0, us));
    tok.tag = std::string(pair.substr(us + 1));
    tok.is_punct = punct_tags.count(tok.tag) > 0;
    out.tokens.push_back(std::move(tok));
  }
  if (out.tokens.empty()) throw DataError("empty sentence");
  return out;
}

std::string serialize(const TaggedSentence& s) {
  std::string out;
  for (std::size_t i = 0; i < s.tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += s.tokens[i].str();
  }
  return out;
}

TaggedSentence strip_punct(const TaggedSentence& s) {
  TaggedSentence out;
  const std::string suffix = "-nopunct";
  bool already = s.id.size() >= suffix.size() &&
                 s.id.compare(s.id.size() - suffix.size(), suffix.size(),
                              suffix) == 0;
  out.id = already ? s.id : s.id + suffix;
  for (const auto& t : s.tokens) {
    if (!t.is_punct) out.tokens.push_back(t);
  }
  if (out.tokens.empty()) {
    throw DataError("sentence '" + s.id + "' contains only punctuation");
  }
  return out;
}

Corpus read_corpus(std::istream& in, const std::set<std::string>& punct_tags) {
  Corpus corpus;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = 0;
    while (first < line.size() && IsSpace(line[first])) ++first;
    if (first == line.size() || line[first] == '#') continue;

    std::string id;
    std::string_view body = line;
    std::size_t tab = line.find('\t');
    if (tab != std::string::npos) {
      id = line.substr(0, tab);
      body = std::string_view(line).substr(tab + 1);
      while (!id.empty() && IsSpace(id.back())) id.pop_back();
      while (!id.empty() && IsSpace(id.front())) id.erase(id.begin());
    }
    if (id.empty()) id = "s" + std::to_string(corpus.sentences.size() + 1);

    TaggedSentence sentence;
    try {
      sentence = parse_tagged_line(body, punct_tags);
    } catch (const DataError& e) {
      std::size_t col = e.column();
      if (col != 0 && tab != std::string::npos) col += tab + 1;
      throw DataError(e.message(), lineno, col);
    }
    sentence.id = id;
    if (!seen.insert(id).second) {
      throw DataError("duplicate sentence id '" + id + "'", lineno);
    }
    if (!sentence.tokens.back().is_punct) {
      corpus.warnings.push_back("line " + std::to_string(lineno) +
                                ": sentence '" + id +
                                "' does not end with punctuation");
    }
    corpus.sentences.push_back(std::move(sentence));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path,
                   const std::set<std::string>& punct_tags) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path + "'");
  return read_corpus(in, punct_tags);
}

std::string write_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& s : corpus.sentences) {
    out += s.id;
    out += '\t';
    out += serialize(s);
    out += '\n';
  }
  return out;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const auto& s : corpus.sentences) {
    stats.rows.push_back({s.id, s.word_count(), s.punct_count()});
  }
  if (stats.rows.empty()) return stats;

  auto summarize = [&](auto field) {
    CountSummary sum;
    sum.min = sum.max = field(stats.rows.front());
    double total = 0;
    for (const auto& row : stats.rows) {
      std::size_t v = field(row);
      sum.min = std::min(sum.min, v);
      sum.max = std::max(sum.max, v);
      total += static_cast<double>(v);
    }
    sum.mean = total / static_cast<double>(stats.rows.size());
    return sum;
  };
  stats.words = summarize([](const SentenceStats& r) { return r.words; });
  stats.punct = summarize([](const SentenceStats& r) { return r.punct; });
  return stats;
}

std::string render_stats(const CorpusStats& stats) {
  std::ostringstream out;
  out << "id\twords\tpunct_marks\n";
  for (const auto& row : stats.rows) {
    out << row.id << '\t' << row.words << '\t' << row.punct << '\n';
  }
  if (stats.words && stats.punct) {
    out << "# sentences\t" << stats.rows.size() << '\n';
    out << "# words\tmin " << stats.words->min << "\tmax " << stats.words->max
        << "\tmean " << FormatMean(stats.words->mean) << '\n';
    out << "# punct_marks\tmin " << stats.punct->min << "\tmax "
        << stats.punct->max << "\tmean " << FormatMean(stats.punct->mean)
        << '\n';
  }
  return out.str();
}

}  // namespace punct
