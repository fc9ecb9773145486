// punctparse: parse, normalize, ablate, compare, stats.
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 resource exhausted.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "punct/chart.hpp"
#include "punct/corpus.hpp"
#include "punct/error.hpp"
#include "punct/experiment.hpp"
#include "punct/grammar.hpp"
#include "punct/normalizer.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExhausted = 3;

// DataError that already carries its file name.
struct LocatedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

punct::Grammar LoadGrammar(const std::string& path) {
  try {
    return punct::load_grammar_file(path);
  } catch (const punct::DataError& e) {
    throw LocatedError(e.located(path));
  }
}

punct::Corpus LoadCorpus(const std::string& path,
                         const std::set<std::string>& tags) {
  try {
    punct::Corpus c = punct::load_corpus(path, tags);
    for (const auto& w : c.warnings) std::cerr << path << ": warning: " << w << '\n';
    return c;
  } catch (const punct::DataError& e) {
    throw LocatedError(e.located(path));
  }
}

void WriteOutput(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw LocatedError(path + ": cannot open for writing");
  out << text;
}

struct ParseArgs {
  std::string grammar, corpus, sentence;
  std::size_t limit = 100;
  bool count_only = false;
  std::uint64_t work_limit = punct::kDefaultWorkLimit;
};

int RunParse(const ParseArgs& a) {
  punct::Grammar g = LoadGrammar(a.grammar);
  punct::Corpus corpus = LoadCorpus(a.corpus, g.punct_table.tags());
  punct::ParseOptions opts;
  opts.work_limit = a.work_limit;

  auto parse_one = [&](const punct::TaggedSentence& s) {
    try {
      return punct::parse(s, g, opts);
    } catch (const punct::DataError& e) {
      throw LocatedError(a.corpus + ": sentence " + s.id + ": " + e.message());
    }
  };

  if (a.sentence.empty()) {
    for (const auto& s : corpus.sentences) {
      std::cout << s.id << '\t' << punct::count_exact(parse_one(s)).value
                << '\n';
    }
    return 0;
  }
  const punct::TaggedSentence* s = corpus.find(a.sentence);
  if (s == nullptr) {
    std::cerr << "error: no sentence with id '" << a.sentence << "'\n";
    return kExitUsage;
  }
  punct::PackedForest forest = parse_one(*s);
  if (a.count_only) {
    std::cout << punct::count_exact(forest).value << '\n';
    return 0;
  }
  for (const auto& tree : punct::unpack(forest, a.limit)) {
    std::cout << punct::bracketed(tree) << '\n';
  }
  return 0;
}

struct NormalizeArgs {
  std::string in, out, passes, direction = "invert";
  bool passes_given = false;
};

int RunNormalize(const NormalizeArgs& a) {
  const punct::PunctTable& table = punct::default_punct_table();
  std::vector<std::string> passes;
  if (a.passes_given) {
    for (auto& p : punct::parse_pass_list(a.passes)) {
      passes.push_back(p == "quote" ? "quote-" + a.direction : p);
    }
  } else {
    passes = a.direction == "apply" ? punct::default_generation_passes()
                                    : punct::default_analysis_passes();
  }
  punct::Corpus corpus = LoadCorpus(a.in, table.tags());
  punct::Corpus result;
  for (const auto& s : corpus.sentences) {
    punct::MarkStream stream =
        punct::normalize(punct::to_stream(s, table), passes);
    result.sentences.push_back(punct::to_sentence(stream, s.id));
  }
  WriteOutput(a.out, punct::write_corpus(result));
  return 0;
}

int RunAblate(const std::string& grammar, const std::string& out,
              const std::string& level) {
  punct::Grammar g = LoadGrammar(grammar);
  punct::AblationConfig cfg;
  cfg.level = *punct::parse_ablation_level(level);
  WriteOutput(out, punct::dump_grammar(punct::ablate_grammar(g, cfg)));
  return 0;
}

struct CompareArgs {
  std::string grammar, corpus, level = "trimmed", format = "tsv",
                               count_mode = "auto";
  unsigned jobs = 1;
  bool keep_punct = false;
  std::uint64_t work_limit = punct::kDefaultWorkLimit;
  std::uint64_t estimate_work_limit = punct::kDefaultWorkLimit;
};

int RunCompare(const CompareArgs& a) {
  punct::Grammar g = LoadGrammar(a.grammar);
  punct::Corpus corpus = LoadCorpus(a.corpus, g.punct_table.tags());
  punct::ComparisonOptions opts;
  opts.ablation.level = *punct::parse_ablation_level(a.level);
  opts.ablation.strip_input_punct = !a.keep_punct;
  opts.count_mode = *punct::parse_count_mode(a.count_mode);
  opts.jobs = a.jobs;
  opts.parse.work_limit = a.work_limit;
  opts.estimate_work_limit = a.estimate_work_limit;
  punct::ComparisonReport report;
  try {
    report = punct::run_comparison(corpus, g, opts);
  } catch (const punct::DataError& e) {
    throw LocatedError(a.corpus + ": " + e.message());
  }
  std::cout << punct::render_report(report, a.format);
  return 0;
}

int RunStats(const std::string& corpus_path, const std::string& grammar) {
  std::set<std::string> tags = punct::default_punct_table().tags();
  if (!grammar.empty()) tags = LoadGrammar(grammar).punct_table.tags();
  punct::Corpus corpus = LoadCorpus(corpus_path, tags);
  std::cout << punct::render_stats(punct::corpus_stats(corpus));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Punctuation-aware unification chart parser"};
  app.require_subcommand(1);

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Parse corpus sentences");
  parse->add_option("--grammar", parse_args.grammar, "Grammar file")
      ->required()->check(CLI::ExistingFile);
  parse->add_option("--corpus", parse_args.corpus, "Tagged corpus file")
      ->required()->check(CLI::ExistingFile);
  parse->add_option("--sentence", parse_args.sentence, "Sentence id");
  parse->add_option("--limit", parse_args.limit, "Maximum trees to print")
      ->check(CLI::PositiveNumber);
  parse->add_flag("--count-only", parse_args.count_only, "Print counts only");
  parse->add_option("--work-limit", parse_args.work_limit,
                    "Unification attempts before giving up")
      ->check(CLI::PositiveNumber);

  NormalizeArgs norm_args;
  auto* normalize = app.add_subcommand("normalize", "Rewrite punctuation");
  normalize->add_option("--in", norm_args.in, "Tagged corpus file")
      ->required()->check(CLI::ExistingFile);
  normalize->add_option("--out", norm_args.out, "Output file (default stdout)");
  auto* passes_opt =
      normalize->add_option("--passes", norm_args.passes,
                            "Comma-separated: point,bracket,graphic,quote");
  normalize->add_option("--direction", norm_args.direction,
                        "apply (generation) or invert (analysis)")
      ->check(CLI::IsMember({"apply", "invert"}));

  std::string ablate_grammar, ablate_out, ablate_level = "trimmed";
  auto* ablate = app.add_subcommand("ablate", "Write the unpunctuated grammar");
  ablate->add_option("--grammar", ablate_grammar, "Grammar file")
      ->required()->check(CLI::ExistingFile);
  ablate->add_option("--out", ablate_out, "Output grammar file")->required();
  ablate->add_option("--level", ablate_level, "strict or trimmed")
      ->check(CLI::IsMember({"strict", "trimmed"}));

  CompareArgs cmp_args;
  auto* compare = app.add_subcommand("compare", "Punctuated vs unpunctuated");
  compare->add_option("--grammar", cmp_args.grammar, "Grammar file")
      ->required()->check(CLI::ExistingFile);
  compare->add_option("--corpus", cmp_args.corpus, "Tagged corpus file")
      ->required()->check(CLI::ExistingFile);
  compare->add_option("--level", cmp_args.level, "strict or trimmed")
      ->check(CLI::IsMember({"strict", "trimmed"}));
  compare->add_option("--format", cmp_args.format, "tsv or json")
      ->check(CLI::IsMember({"tsv", "json"}));
  compare->add_option("--count-mode", cmp_args.count_mode, "exact or auto")
      ->check(CLI::IsMember({"exact", "auto"}));
  compare->add_option("--jobs", cmp_args.jobs, "Worker threads")
      ->check(CLI::PositiveNumber);
  compare->add_flag("--keep-punct", cmp_args.keep_punct,
                    "Do not strip punctuation before the unpunctuated parse");
  compare->add_option("--work-limit", cmp_args.work_limit,
                      "Unification attempts before giving up")
      ->check(CLI::PositiveNumber);
  compare->add_option("--estimate-work-limit", cmp_args.estimate_work_limit,
                      "Work limit for the backbone estimate in auto mode")
      ->check(CLI::PositiveNumber);

  std::string stats_corpus, stats_grammar;
  auto* stats = app.add_subcommand("stats", "Corpus length statistics");
  stats->add_option("--corpus", stats_corpus, "Tagged corpus file")
      ->required()->check(CLI::ExistingFile);
  stats->add_option("--grammar", stats_grammar,
                    "Grammar whose punctuation tags to use")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  norm_args.passes_given = passes_opt->count() > 0;

  try {
    if (parse->parsed()) return RunParse(parse_args);
    if (normalize->parsed()) return RunNormalize(norm_args);
    if (ablate->parsed()) return RunAblate(ablate_grammar, ablate_out, ablate_level);
    if (compare->parsed()) return RunCompare(cmp_args);
    if (stats->parsed()) return RunStats(stats_corpus, stats_grammar);
  } catch (const LocatedError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const punct::DataError& e) {
    std::cerr << "error: " << e.located() << '\n';
    return kExitData;
  } catch (const punct::ResourceExhausted& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitExhausted;
  } catch (const punct::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
