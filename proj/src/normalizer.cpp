#include "punct/normalizer.hpp"

#include <utility>

#include "punct/error.hpp"

namespace punct {

namespace {

bool IsPoint(const StreamItem& item) {
  return item.is_mark() && item.mark->cls == MarkClass::kPoint;
}

bool IsMarkSymbol(const StreamItem& item, std::string_view symbol) {
  return item.is_mark() && item.mark->symbol == symbol;
}

bool IsCloser(const StreamItem& item) {
  return item.is_mark() && item.mark->cls != MarkClass::kPoint &&
         item.mark->side == MarkSide::kClose;
}

bool IsCloseQuote(const StreamItem& item) {
  return IsCloser(item) && item.mark->cls == MarkClass::kQuote;
}

bool IsAbbreviation(const StreamItem& item) {
  return !item.is_mark() && !item.token.word.empty() &&
         item.token.word.back() == '.';
}

}  // namespace

MarkStream to_stream(const TaggedSentence& s, const PunctTable& table) {
  MarkStream out;
  for (const auto& tok : s.tokens) {
    StreamItem item{tok, std::nullopt};
    if (const PunctMark* m = table.by_tag(tok.tag)) {
      item.mark = *m;
      item.token.is_punct = true;
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

TaggedSentence to_sentence(const MarkStream& stream, std::string id) {
  TaggedSentence out;
  out.id = std::move(id);
  for (const auto& item : stream.items) out.tokens.push_back(item.token);
  return out;
}

StreamItem word_item(std::string word, std::string tag) {
  return {Token{std::move(word), std::move(tag), false}, std::nullopt};
}

StreamItem mark_item(const PunctMark& mark) {
  std::string word = mark.symbol;
  return {Token{std::move(word), mark.tag, true}, mark};
}

MarkStream point_absorption(const MarkStream& s) {
  MarkStream out;
  const auto& items = s.items;
  std::size_t i = 0;
  while (i < items.size()) {
    if (!IsPoint(items[i])) {
      out.items.push_back(items[i++]);
      continue;
    }
    std::size_t best = i;
    std::size_t j = i + 1;
    for (; j < items.size() && IsPoint(items[j]); ++j) {
      if (items[j].mark->strength > items[best].mark->strength) best = j;
    }
    out.items.push_back(items[best]);
    i = j;
  }
  return out;
}

MarkStream bracket_absorption(const MarkStream& s) {
  MarkStream out;
  // Scanning right to left handles chains like ", - )" in one sweep.
  std::vector<StreamItem> rev;
  bool before_closer = false;
  for (std::size_t i = s.items.size(); i-- > 0;) {
    const StreamItem& item = s.items[i];
    if (before_closer && (IsMarkSymbol(item, "c") || IsMarkSymbol(item, "d"))) {
      continue;
    }
    before_closer = IsCloser(item);
    rev.push_back(item);
  }
  out.items.assign(rev.rbegin(), rev.rend());
  return out;
}

MarkStream quote_transposition(const MarkStream& s, QuoteDirection direction) {
  MarkStream out = s;
  auto& items = out.items;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < items.size(); ++i) {
      bool swap = direction == QuoteDirection::kApply
                      ? IsCloseQuote(items[i]) && IsPoint(items[i + 1])
                      : IsPoint(items[i]) && IsCloseQuote(items[i + 1]);
      if (swap) {
        std::swap(items[i], items[i + 1]);
        changed = true;
      }
    }
  }
  return out;
}

MarkStream graphic_absorption(const MarkStream& s) {
  MarkStream out;
  for (const auto& item : s.items) {
    if (IsMarkSymbol(item, "f") && !out.items.empty() &&
        IsAbbreviation(out.items.back())) {
      continue;
    }
    out.items.push_back(item);
  }
  return out;
}

MarkStream normalize(const MarkStream& s,
                     const std::vector<std::string>& passes) {
  MarkStream out = s;
  for (const auto& pass : passes) {
    if (pass == "point") {
      out = point_absorption(out);
    } else if (pass == "bracket") {
      out = bracket_absorption(out);
    } else if (pass == "graphic") {
      out = graphic_absorption(out);
    } else if (pass == "quote-apply") {
      out = quote_transposition(out, QuoteDirection::kApply);
    } else if (pass == "quote-invert") {
      out = quote_transposition(out, QuoteDirection::kInvert);
    } else {
      throw Error("unknown normalizer pass '" + pass + "'");
    }
  }
  return out;
}

const std::vector<std::string>& default_generation_passes() {
  static const std::vector<std::string> passes{"point", "bracket", "graphic",
                                               "quote-apply"};
  return passes;
}

const std::vector<std::string>& default_analysis_passes() {
  static const std::vector<std::string> passes{"quote-invert"};
  return passes;
}

std::vector<std::string> parse_pass_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view piece = text.substr(start, comma - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (!piece.empty()) out.emplace_back(piece);
    start = comma + 1;
  }
  return out;
}

}  // namespace punct
