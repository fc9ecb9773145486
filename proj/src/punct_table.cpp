#include "punct/punct_table.hpp"

#include "punct/error.hpp"

namespace punct {

std::string_view to_string(MarkClass cls) {
  switch (cls) {
    case MarkClass::kPoint:
      return "point";
    case MarkClass::kBracket:
      return "bracket";
    case MarkClass::kQuote:
      return "quote";
  }
  return "point";
}

std::string_view to_string(MarkSide side) {
  return side == MarkSide::kOpen ? "open" : "close";
}

std::optional<MarkClass> parse_mark_class(std::string_view text) {
  if (text == "point") return MarkClass::kPoint;
  if (text == "bracket") return MarkClass::kBracket;
  if (text == "quote") return MarkClass::kQuote;
  return std::nullopt;
}

std::optional<MarkSide> parse_mark_side(std::string_view text) {
  if (text == "open") return MarkSide::kOpen;
  if (text == "close") return MarkSide::kClose;
  return std::nullopt;
}

void PunctTable::add(PunctMark mark) {
  if (mark.strength < 1 || mark.strength > 5) {
    throw DataError("mark '" + mark.symbol + "' has strength " +
                    std::to_string(mark.strength) + ", expected 1-5");
  }
  if (by_symbol(mark.symbol) != nullptr) {
    throw DataError("duplicate punctuation mark '" + mark.symbol + "'");
  }
  if (by_tag(mark.tag) != nullptr) {
    throw DataError("duplicate punctuation tag '" + mark.tag + "'");
  }
  marks_.push_back(std::move(mark));
}

const PunctMark* PunctTable::by_tag(std::string_view tag) const {
  for (const auto& m : marks_) {
    if (m.tag == tag) return &m;
  }
  return nullptr;
}

const PunctMark* PunctTable::by_symbol(std::string_view symbol) const {
  for (const auto& m : marks_) {
    if (m.symbol == symbol) return &m;
  }
  return nullptr;
}

std::set<std::string> PunctTable::tags() const {
  std::set<std::string> out;
  for (const auto& m : marks_) out.insert(m.tag);
  return out;
}

const PunctTable& default_punct_table() {
  static const PunctTable table = [] {
    using C = MarkClass;
    using S = MarkSide;
    PunctTable t;
    t.add({"f", "FS", 5, C::kPoint, S::kClose});
    t.add({"c", "C", 1, C::kPoint, S::kClose});
    t.add({"sc", "SC", 3, C::kPoint, S::kClose});
    t.add({"co", "CO", 4, C::kPoint, S::kClose});
    t.add({"d", "D", 2, C::kPoint, S::kClose});
    t.add({"q", "Q", 5, C::kPoint, S::kClose});
    t.add({"x", "X", 5, C::kPoint, S::kClose});
    t.add({"op", "OP", 1, C::kBracket, S::kOpen});
    t.add({"cp", "CP", 1, C::kBracket, S::kClose});
    t.add({"oq", "OQ", 1, C::kQuote, S::kOpen});
    t.add({"cq", "CQ", 1, C::kQuote, S::kClose});
    return t;
  }();
  return table;
}

}  // namespace punct
