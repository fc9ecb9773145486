#ifndef PUNCT_PUNCT_TABLE_HPP_
#define PUNCT_PUNCT_TABLE_HPP_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace punct {

enum class MarkClass { kPoint, kBracket, kQuote };
// Opening brackets/quotes precede what they mark; everything else follows.
enum class MarkSide { kOpen, kClose };

std::string_view to_string(MarkClass cls);
std::string_view to_string(MarkSide side);
std::optional<MarkClass> parse_mark_class(std::string_view text);
std::optional<MarkSide> parse_mark_side(std::string_view text);

struct PunctMark {
  std::string symbol;  // stop-feature value, e.g. "c", "sc", "f"
  std::string tag;     // corpus tag, e.g. "C", "SC", "FS"
  int strength = 1;    // 1 (comma) .. 5 (period)
  MarkClass cls = MarkClass::kPoint;
  MarkSide side = MarkSide::kClose;

  friend bool operator==(const PunctMark&, const PunctMark&) = default;
};

// Mapping between corpus punctuation tags and marks. Insertion order is
// preserved for dumping.
class PunctTable {
 public:
  // Throws DataError on a duplicate symbol or tag, or a strength outside
  // 1..5.
  void add(PunctMark mark);

  const PunctMark* by_tag(std::string_view tag) const;
  const PunctMark* by_symbol(std::string_view symbol) const;
  const std::vector<PunctMark>& marks() const { return marks_; }
  std::set<std::string> tags() const;
  bool empty() const { return marks_.empty(); }

  friend bool operator==(const PunctTable&, const PunctTable&) = default;

 private:
  std::vector<PunctMark> marks_;
};

// The table used by the bundled grammar: FS, C, SC, CO, D, OP/CP, OQ/CQ,
// Q, X with strengths c(1) < d(2) < sc(3) < co(4) < f=q=x(5).
const PunctTable& default_punct_table();

}  // namespace punct

#endif  // PUNCT_PUNCT_TABLE_HPP_
