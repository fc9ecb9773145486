#include "punct/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "punct/error.hpp"

namespace punct {

using nlohmann::json;

std::string_view to_string(AblationLevel level) {
  return level == AblationLevel::kStrict ? "strict" : "trimmed";
}

std::optional<AblationLevel> parse_ablation_level(std::string_view text) {
  if (text == "strict") return AblationLevel::kStrict;
  if (text == "trimmed") return AblationLevel::kTrimmed;
  return std::nullopt;
}

std::string_view to_string(CountMode mode) {
  return mode == CountMode::kExact ? "exact" : "auto";
}

std::optional<CountMode> parse_count_mode(std::string_view text) {
  if (text == "exact") return CountMode::kExact;
  if (text == "auto") return CountMode::kAuto;
  return std::nullopt;
}

namespace {

bool Matches(const std::string& id, const std::string& name) {
  return id == name || id.rfind(name + ".", 0) == 0;
}

Category Strip(const Category& c, const std::vector<std::string>& features) {
  Category out = c;
  for (const auto& f : features) out.erase(f);
  return out;
}

}  // namespace

std::string canonical_rule(const RuleTemplate& rule) {
  std::map<std::string, std::string> names;
  auto render = [&](const Category& c) {
    Category out(c.cat());
    for (const auto& [f, v] : c.features()) {
      if (!v.is_var()) {
        out.set(f, v);
        continue;
      }
      auto [it, fresh] = names.emplace(v.name(), "");
      if (fresh) it->second = "?" + std::to_string(names.size());
      out.set(f, FeatureValue::Var(it->second));
    }
    return out.str();
  };
  std::string text = render(rule.mother) + " ->";
  for (const auto& d : rule.daughters) {
    text += ' ';
    if (d.is_punct_terminal) text += '!';
    text += render(d.category);
  }
  return text;
}

std::vector<RuleTemplate> dedupe_rules(const std::vector<RuleTemplate>& rules) {
  std::vector<RuleTemplate> out;
  std::set<std::string> seen;
  for (const auto& r : rules) {
    if (seen.insert(canonical_rule(r)).second) out.push_back(r);
  }
  return out;
}

Grammar ablate_grammar(const Grammar& g, const AblationConfig& cfg) {
  Grammar out = g;
  const auto& strip = g.ablation_features;

  std::vector<FeatureDecl> decls;
  for (const auto& d : g.feature_decls) {
    if (std::find(strip.begin(), strip.end(), d.name) == strip.end()) {
      decls.push_back(d);
    }
  }
  out.feature_decls = std::move(decls);
  const bool stop = out.has_stop();

  for (auto* table : {&out.lexicon, &out.word_lexicon}) {
    for (auto& [key, cats] : *table) {
      std::vector<Category> kept;
      for (const auto& c : cats) {
        Category s = Strip(c, strip);
        if (std::find(kept.begin(), kept.end(), s) == kept.end()) {
          kept.push_back(std::move(s));
        }
      }
      cats = std::move(kept);
    }
  }
  std::vector<Category> tops;
  for (const auto& t : g.tops) {
    Category s = Strip(t, strip);
    if (std::find(tops.begin(), tops.end(), s) == tops.end()) tops.push_back(s);
  }
  out.tops = std::move(tops);

  std::vector<RuleTemplate> rules;
  for (const auto& r : g.rules) {
    if (cfg.level == AblationLevel::kTrimmed &&
        std::any_of(g.merges.begin(), g.merges.end(),
                    [&](const MergeEntry& m) { return Matches(r.id, m.drop); })) {
      continue;
    }
    RuleTemplate a;
    a.id = r.id;
    a.mother = Strip(r.mother, strip);
    for (const auto& d : r.daughters) {
      if (d.is_punct_terminal) continue;
      a.daughters.push_back({Strip(d.category, strip), false, false});
    }
    if (a.daughters.empty()) continue;
    if (a.daughters.size() == 1 && a.daughters[0].category == a.mother) {
      continue;
    }
    a.explicit_stop = stop && r.explicit_stop;
    rules.push_back(std::move(a));
  }
  out.rules = dedupe_rules(rules);

  std::vector<MergeEntry> merges;
  for (const auto& m : g.merges) {
    auto known = [&](const std::string& name) {
      return std::any_of(out.rules.begin(), out.rules.end(),
                         [&](const RuleTemplate& r) { return Matches(r.id, name); });
    };
    if (known(m.drop) && known(m.keep)) merges.push_back(m);
  }
  out.merges = std::move(merges);
  return out;
}

// ---------------------------------------------------------------------------

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0, j = 0;
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)); };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t si = i, sj = j;
      while (i < a.size() && digit(a[i])) ++i;
      while (j < b.size() && digit(b[j])) ++j;
      std::string_view na = a.substr(si, i - si), nb = b.substr(sj, j - sj);
      while (na.size() > 1 && na.front() == '0') na.remove_prefix(1);
      while (nb.size() > 1 && nb.front() == '0') nb.remove_prefix(1);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j];
    ++i;
    ++j;
  }
  if (a.size() - i != b.size() - j) return a.size() - i < b.size() - j;
  return a < b;
}

namespace {

struct Outcome {
  std::optional<ParseCount> count;
  bool exhausted = false;
};

Outcome Count(const TaggedSentence& s, const Grammar& g,
              const ComparisonOptions& options) {
  Outcome out;
  try {
    out.count = count_exact(parse(s, g, options.parse));
    return out;
  } catch (const ResourceExhausted&) {
    out.exhausted = true;
  }
  if (options.count_mode == CountMode::kAuto) {
    try {
      ParseOptions wide = options.parse;
      wide.work_limit = options.estimate_work_limit;
      out.count = estimate_backbone(s, g, wide);
    } catch (const ResourceExhausted&) {
    }
  }
  return out;
}

SentenceResult Compare(const TaggedSentence& s, const Grammar& punctuated,
                       const Grammar& ablated,
                       const ComparisonOptions& options) {
  SentenceResult row;
  row.id = s.id;
  row.words = s.word_count();
  row.punct_marks = s.punct_count();

  Outcome p = Count(s, punctuated, options);
  if (p.exhausted) row.flags.push_back("punct_exhausted");
  row.punct_parses = p.count;
  if (!p.count || p.count->value == 0) row.flags.push_back("punct_failure");

  TaggedSentence input = s;
  if (options.ablation.strip_input_punct && s.punct_count() > 0) {
    input = strip_punct(s);
  }
  Outcome u = Count(input, ablated, options);
  if (u.exhausted) row.flags.push_back("unpunct_exhausted");
  row.unpunct_parses = u.count;
  if (!u.count || u.count->value == 0) row.flags.push_back("unpunct_failure");

  if (p.count && u.count && p.count->value > 0 && u.count->value > 0) {
    row.ratio = Rational(u.count->value, p.count->value);
  }
  return row;
}

std::string CountText(const std::optional<ParseCount>& c) {
  return c ? c->value.str() : "-";
}

std::string_view KindText(const std::optional<ParseCount>& c) {
  return c ? to_string(c->kind) : std::string_view("-");
}

json RationalJson(const Rational& r) {
  return {{"num", boost::multiprecision::numerator(r).str()},
          {"den", boost::multiprecision::denominator(r).str()}};
}

Rational RationalFromJson(const json& j) {
  return Rational(BigInt(j.at("num").get<std::string>()),
                  BigInt(j.at("den").get<std::string>()));
}

json CountJson(const std::optional<ParseCount>& c) {
  if (!c) return nullptr;
  return {{"value", c->value.str()}, {"kind", std::string(to_string(c->kind))}};
}

std::optional<ParseCount> CountFromJson(const json& j) {
  if (j.is_null()) return std::nullopt;
  ParseCount c;
  c.value = BigInt(j.at("value").get<std::string>());
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "exact") {
    c.kind = ParseCount::Kind::kExact;
  } else if (kind == "upper_bound") {
    c.kind = ParseCount::Kind::kBackboneUpperBound;
  } else {
    throw DataError("unknown count kind '" + kind + "'");
  }
  return c;
}

}  // namespace

std::optional<ReportAggregates> aggregate(
    const std::vector<SentenceResult>& rows, std::size_t trim) {
  std::vector<BigInt> counts;
  ReportAggregates agg;
  agg.trim = trim;
  for (const auto& r : rows) {
    if (r.punct_parses) counts.push_back(r.punct_parses->value);
    if (r.ratio && *r.ratio >= 100) ++agg.ratio_at_least_100;
  }
  if (counts.empty()) return std::nullopt;
  std::sort(counts.begin(), counts.end());
  agg.min_punct = counts.front();
  agg.max_punct = counts.back();
  BigInt total = 0;
  for (const auto& c : counts) total += c;
  agg.mean_punct = Rational(total, BigInt(counts.size()));
  if (counts.size() > 2 * trim) {
    BigInt kept = 0;
    for (std::size_t i = trim; i + trim < counts.size(); ++i) kept += counts[i];
    agg.trimmed_mean_punct =
        Rational(kept, BigInt(counts.size() - 2 * trim));
  }
  return agg;
}

ComparisonReport run_comparison(const Corpus& corpus, const Grammar& g,
                                const ComparisonOptions& options) {
  ComparisonReport report;
  report.level = options.ablation.level;
  const Grammar ablated = ablate_grammar(g, options.ablation);
  const auto& sentences = corpus.sentences;
  std::vector<SentenceResult> rows(sentences.size());

  unsigned jobs = std::max(1U, options.jobs);
  if (jobs == 1 || sentences.size() < 2) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      rows[i] = Compare(sentences[i], g, ablated, options);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < sentences.size(); i = next++) {
            rows[i] = Compare(sentences[i], g, ablated, options);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SentenceResult& a, const SentenceResult& b) {
                     return natural_less(a.id, b.id);
                   });
  report.rows = std::move(rows);
  report.aggregates = aggregate(report.rows, options.trim);
  return report;
}

std::string format_decimal(const Rational& value, int places) {
  BigInt scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  bool negative = value < 0;
  Rational v = negative ? Rational(-value) : value;
  BigInt num = boost::multiprecision::numerator(v) * scale;
  BigInt den = boost::multiprecision::denominator(v);
  BigInt scaled = (2 * num + den) / (2 * den);
  std::string digits = BigInt(scaled / scale).str();
  std::string frac = BigInt(scaled % scale).str();
  std::string out = negative ? "-" : "";
  out += digits;
  if (places > 0) {
    out += '.';
    out += std::string(static_cast<std::size_t>(places) - frac.size(), '0');
    out += frac;
  }
  return out;
}

std::string render_report(const ComparisonReport& report,
                          std::string_view format) {
  if (format == "tsv") {
    std::ostringstream out;
    out << "id\twords\tpunct_marks\tpunct_parses\tunpunct_parses\t"
           "unpunct_kind\tratio\tflags\n";
    for (const auto& r : report.rows) {
      std::string flags;
      for (const auto& f : r.flags) flags += (flags.empty() ? "" : ",") + f;
      out << r.id << '\t' << r.words << '\t' << r.punct_marks << '\t'
          << CountText(r.punct_parses) << '\t' << CountText(r.unpunct_parses)
          << '\t' << KindText(r.unpunct_parses) << '\t'
          << (r.ratio ? format_decimal(*r.ratio) : "-") << '\t'
          << (flags.empty() ? "-" : flags) << '\n';
    }
    if (const auto& a = report.aggregates) {
      out << "# level\t" << to_string(report.level) << '\n';
      out << "# punct_parses\tmin " << a->min_punct << "\tmax " << a->max_punct
          << "\tmean " << format_decimal(a->mean_punct) << '\n';
      out << "# trimmed_mean_punct (k=" << a->trim << ")\t"
          << (a->trimmed_mean_punct ? format_decimal(*a->trimmed_mean_punct)
                                    : "-")
          << '\n';
      out << "# ratio_at_least_100\t" << a->ratio_at_least_100 << '\n';
    }
    return out.str();
  }
  if (format == "json") {
    json rows = json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"id", r.id},
                      {"words", r.words},
                      {"punct_marks", r.punct_marks},
                      {"punct_parses", CountJson(r.punct_parses)},
                      {"unpunct_parses", CountJson(r.unpunct_parses)},
                      {"ratio", r.ratio ? RationalJson(*r.ratio) : json(nullptr)},
                      {"ratio_text",
                       r.ratio ? json(format_decimal(*r.ratio)) : json(nullptr)},
                      {"flags", r.flags}});
    }
    json doc = {{"level", std::string(to_string(report.level))},
                {"rows", rows}};
    if (const auto& a = report.aggregates) {
      doc["aggregates"] = {
          {"min_punct", a->min_punct.str()},
          {"max_punct", a->max_punct.str()},
          {"mean_punct", RationalJson(a->mean_punct)},
          {"trimmed_mean_punct", a->trimmed_mean_punct
                                     ? RationalJson(*a->trimmed_mean_punct)
                                     : json(nullptr)},
          {"trim", a->trim},
          {"ratio_at_least_100", a->ratio_at_least_100}};
    } else {
      doc["aggregates"] = nullptr;
    }
    return doc.dump(2) + "\n";
  }
  throw Error("unknown report format '" + std::string(format) + "'");
}

ComparisonReport parse_report_json(std::string_view text) {
  ComparisonReport report;
  try {
    json doc = json::parse(text);
    auto level = parse_ablation_level(doc.at("level").get<std::string>());
    if (!level) throw DataError("unknown ablation level");
    report.level = *level;
    for (const auto& j : doc.at("rows")) {
      SentenceResult r;
      r.id = j.at("id").get<std::string>();
      r.words = j.at("words").get<std::size_t>();
      r.punct_marks = j.at("punct_marks").get<std::size_t>();
      r.punct_parses = CountFromJson(j.at("punct_parses"));
      r.unpunct_parses = CountFromJson(j.at("unpunct_parses"));
      if (!j.at("ratio").is_null()) r.ratio = RationalFromJson(j.at("ratio"));
      r.flags = j.at("flags").get<std::vector<std::string>>();
      report.rows.push_back(std::move(r));
    }
    const json& a = doc.at("aggregates");
    if (!a.is_null()) {
      ReportAggregates agg;
      agg.min_punct = BigInt(a.at("min_punct").get<std::string>());
      agg.max_punct = BigInt(a.at("max_punct").get<std::string>());
      agg.mean_punct = RationalFromJson(a.at("mean_punct"));
      if (!a.at("trimmed_mean_punct").is_null()) {
        agg.trimmed_mean_punct = RationalFromJson(a.at("trimmed_mean_punct"));
      }
      agg.trim = a.at("trim").get<std::size_t>();
      agg.ratio_at_least_100 = a.at("ratio_at_least_100").get<std::size_t>();
      report.aggregates = agg;
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  return report;
}

}  // namespace punct
