/* Copyright 2026 The kex Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "kex_cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "kex/corpus.h"
#include "kex/eval.h"
#include "kex/experiment.h"
#include "kex/report.h"
#include "kex/stats.h"

namespace kex::cli {
namespace {

namespace fs = std::filesystem;

constexpr char kVersion[] = "0.1.0";
constexpr char kManifestName[] = "manifest.txt";

struct Options {
  // Global.
  std::string dataset;
  std::string out;
  uint64_t seed = 0;
  size_t jobs = 1;
  std::string config;
  LexiconPaths lexicons;

  std::string methods = "all";
  std::string method;
  std::string corpus;
  std::string top = "3,5,7,10";
  std::string features = "all";
  size_t window = kDefaultWindow;
  double damping = kDefaultDamping;
  size_t bins = kDefaultNbBins;
  size_t crf_bins = FeatureBuckets::kDefaultBins;
  double l2 = 1.0;
  int max_epochs = 200;
  size_t max_phrase_len = 4;
  bool maximal_only = false;
  std::string split;
  std::string model;
  std::string extractions;
  std::string results;
  double alpha = 0.05;
  std::string sided = "two";
  std::string pairs;
  std::string report_a;
  std::string report_b;
  std::string variant_a;
  std::string variant_b;
};

std::string ReadFile(const std::string& path, std::string_view hint = "") {
  if (!fs::exists(path)) throw MissingFileError(path, hint);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Writes through a temporary file so readers never see partial output.
void WriteFile(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string Hex(uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string Trim(std::string text) {
  text.erase(0, text.find_first_not_of(" \t\r"));
  text.erase(text.find_last_not_of(" \t\r") + 1);
  return text;
}

// ---- config files and manifests ----

struct ConfigEntry {
  std::string section;  // empty: applies to every command
  std::string key;
  std::string value;
  size_t line = 0;
};

std::vector<ConfigEntry> ParseConfig(const std::string& text,
                                     const std::string& path) {
  std::vector<ConfigEntry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  size_t line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    const std::string line = Trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw Error(path + ":" + std::to_string(line_number) +
                    ": malformed section header");
      }
      section = Trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(path + ":" + std::to_string(line_number) +
                  ": expected key=value");
    }
    std::string key = Trim(line.substr(0, eq));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (key.empty()) {
      throw Error(path + ":" + std::to_string(line_number) + ": empty key");
    }
    entries.push_back({section, key, Trim(line.substr(eq + 1)), line_number});
  }
  return entries;
}

CLI::Option* FindOption(CLI::App& app, const std::string& key) {
  return app.get_option_no_throw("--" + key);
}

// Fills options that were not given on the command line. Keys outside a
// section apply to every command that has them; keys in a [command]
// section only to that command.
void ApplyConfig(CLI::App& app, CLI::App& command,
                 const std::vector<ConfigEntry>& entries,
                 const std::string& path) {
  for (const ConfigEntry& e : entries) {
    const auto where = path + ":" + std::to_string(e.line) + ": ";
    if (!e.section.empty()) {
      if (app.get_subcommand_no_throw(e.section) == nullptr) {
        throw Error(where + "unknown command section [" + e.section + "]");
      }
      if (e.section != command.get_name()) continue;
    }
    if (e.key == "config" || e.key == "help") {
      throw Error(where + "'" + e.key + "' cannot be set from a config file");
    }
    CLI::Option* option = FindOption(command, e.key);
    if (option == nullptr) option = FindOption(app, e.key);
    if (option == nullptr) {
      bool known = false;
      for (CLI::App* sub : app.get_subcommands({})) {
        known = known || FindOption(*sub, e.key) != nullptr;
      }
      if (!known || !e.section.empty()) {
        throw Error(where + "unknown key '" + e.key + "'");
      }
      continue;
    }
    if (option->count() > 0) continue;  // the command line wins
    option->add_result(e.value);
    option->run_callback();
  }
}

// Effective option values of `command` and the globals, as config lines.
std::vector<std::pair<std::string, std::string>> EffectiveSettings(
    CLI::App& app, CLI::App& command) {
  std::vector<std::pair<std::string, std::string>> settings;
  const auto collect = [&](CLI::App& scope) {
    for (const CLI::Option* option : scope.get_options()) {
      const std::string name = option->get_single_name();
      if (name.empty() || name == "help" || name == "config") continue;
      std::string value;
      if (option->count() > 0) {
        for (const std::string& r : option->results()) {
          if (!value.empty()) value += ',';
          value += r;
        }
      } else {
        value = option->get_default_str();
      }
      if (!value.empty()) settings.emplace_back(name, value);
    }
  };
  collect(app);
  collect(command);
  return settings;
}

// manifest.txt keeps one [command] block per command run in this
// directory; re-running a command replaces its block.
void WriteManifest(const fs::path& root, const std::string& command,
                   const std::vector<std::pair<std::string, std::string>>&
                       settings,
                   const std::vector<std::pair<std::string, std::string>>&
                       inputs) {
  const fs::path path = root / kManifestName;
  std::map<std::string, std::string> blocks;
  std::vector<std::string> order;
  if (fs::exists(path)) {
    std::istringstream in(ReadFile(path.string()));
    std::string line;
    std::string current;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() == '[' && line.back() == ']') {
        current = line.substr(1, line.size() - 2);
        if (!blocks.count(current)) order.push_back(current);
        blocks[current].clear();
      }
      if (!current.empty() && !line.empty()) {
        blocks[current] += line + "\n";
      }
    }
  }
  std::string block = "[" + command + "]\n";
  block += "# kex " + std::string(kVersion) + "\n";
  for (const auto& [label, file] : inputs) {
    block += "# input " + label + " " + file + " fnv1a64=" +
             Hex(Fnv1a64(ReadFile(file))) + "\n";
  }
  for (const auto& [key, value] : settings) block += key + "=" + value + "\n";
  if (!blocks.count(command)) order.push_back(command);
  blocks[command] = block;

  std::string content =
      "# kex run manifest. Reproduce a command with\n"
      "#   kex <command> --config manifest.txt\n";
  for (const std::string& name : order) content += "\n" + blocks[name];
  WriteFile(path, content);
}

// ---- shared command plumbing ----

class Context {
 public:
  Context(const Options& options, CLI::App& app, CLI::App& command,
          std::ostream& out, std::ostream& err)
      : options_(options), app_(app), command_(command), out_(out),
        err_(err) {}

  const Options& options() const { return options_; }
  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  bool HasSeed() const { return FindOption(app_, "seed")->count() > 0; }
  void RequireSeed(const std::string& why) const {
    if (!HasSeed()) throw Error(why + " requires an explicit --seed");
  }

  fs::path RunDir() const {
    if (options_.out.empty()) throw Error("--out is required");
    return fs::path(options_.out);
  }
  fs::path SplitPath() const {
    return options_.split.empty() ? RunDir() / "splits" / "split.tsv"
                                  : fs::path(options_.split);
  }

  const std::vector<Document>& Dataset() {
    if (!dataset_) {
      if (options_.dataset.empty()) throw Error("--dataset is required");
      if (!fs::exists(options_.dataset)) {
        throw MissingFileError(options_.dataset);
      }
      dataset_ = LoadDataset(options_.dataset);
      AddInput("dataset", options_.dataset);
    }
    return *dataset_;
  }

  DatasetSplit Split() {
    const std::string path = SplitPath().string();
    DatasetSplit split =
        SplitFromTsv(ReadFile(path, "run `kex prepare` first"));
    AddInput("split", path);
    return split;
  }

  void AddInput(const std::string& label, const std::string& path) {
    inputs_.emplace_back(label, path);
  }

  void Manifest() {
    WriteManifest(RunDir(), command_.get_name(),
                  EffectiveSettings(app_, command_), inputs_);
  }

  ExtractorParams Params(bool mandatory_features) const {
    ExtractorParams params;
    params.textrank.window = options_.window;
    params.textrank.damping = options_.damping;
    params.candidates.max_phrase_len = options_.max_phrase_len;
    params.candidates.maximal_only = options_.maximal_only;
    params.nb_bins = options_.bins;
    params.crf_bins = options_.crf_bins;
    params.crf_features = FeatureSet::Parse(options_.features);
    if (mandatory_features) {
      params.crf_features = params.crf_features.WithMandatory();
    }
    params.crf.l2 = options_.l2;
    params.crf.max_epochs = options_.max_epochs;
    params.crf.seed = options_.seed;
    return params;
  }

  const PipelineConfig& pipeline() {
    const LexiconPaths& paths = options_.lexicons;
    if (paths.stopwords.empty() && paths.pos_lexicon.empty() &&
        paths.lemma_exceptions.empty()) {
      return PipelineConfig::Default();
    }
    if (!pipeline_) {
      for (const auto& [label, path] :
           {std::pair{"stopwords", paths.stopwords},
            std::pair{"pos-lexicon", paths.pos_lexicon},
            std::pair{"lemma-exceptions", paths.lemma_exceptions}}) {
        if (path.empty()) continue;
        if (!fs::exists(path)) throw MissingFileError(path);
        AddInput(label, path);
      }
      pipeline_ = PipelineConfig::FromFiles(paths);
    }
    return *pipeline_;
  }

 private:
  const Options& options_;
  CLI::App& app_;
  CLI::App& command_;
  std::ostream& out_;
  std::ostream& err_;
  std::optional<std::vector<Document>> dataset_;
  std::optional<PipelineConfig> pipeline_;
  std::vector<std::pair<std::string, std::string>> inputs_;
};

std::vector<CorpusVariant> ParseVariants(const std::string& text) {
  if (text.empty() || text == "all") return CorpusVariant::Canonical();
  std::vector<CorpusVariant> variants;
  for (const std::string& code : SplitList(text)) {
    variants.push_back(CorpusVariant::Parse(code));
  }
  return variants;
}

CorpusVariant SingleVariant(const std::string& text) {
  if (text.empty()) throw Error("--corpus is required");
  return CorpusVariant::Parse(text);
}

std::vector<size_t> ParseTopN(const std::string& text) {
  std::vector<size_t> values;
  for (const std::string& item : SplitList(text)) {
    size_t used = 0;
    long long value = -1;
    try {
      value = std::stoll(item, &used);
    } catch (const std::exception&) {
    }
    if (used != item.size() || value <= 0) {
      throw Error("--top expects positive integers, got '" + item + "'");
    }
    values.push_back(static_cast<size_t>(value));
  }
  if (values.empty()) throw Error("--top is empty");
  return values;
}

std::vector<Method> ParseMethods(const std::string& text) {
  if (text.empty() || text == "all") return AllMethods();
  std::vector<Method> methods;
  for (const std::string& name : SplitList(text)) {
    methods.push_back(ParseMethod(name));
  }
  return methods;
}

Method SingleMethod(const std::string& text) {
  if (text.empty()) throw Error("--method is required");
  return ParseMethod(text);
}

fs::path ModelPath(const Context& ctx, Method method,
                   const CorpusVariant& variant) {
  if (!ctx.options().model.empty()) return ctx.options().model;
  return ctx.RunDir() / "models" /
         (std::string(MethodName(method)) + "_" + variant.code() + ".model");
}

fs::path ExtractionPath(const Context& ctx, Method method,
                        const CorpusVariant& variant) {
  if (!ctx.options().extractions.empty()) return ctx.options().extractions;
  return ctx.RunDir() / "reports" /
         ("extract_" + std::string(MethodName(method)) + "_" +
          variant.code() + ".tsv");
}

// Test documents of the prepared split, or the whole dataset when no split
// exists and `allow_all` is set.
std::vector<Document> EvaluationDocs(Context& ctx, bool allow_all) {
  const auto& docs = ctx.Dataset();
  if (allow_all && ctx.options().split.empty() &&
      !fs::exists(ctx.SplitPath())) {
    return docs;
  }
  return SelectDocuments(docs, ctx.Split().test);
}

// ---- commands ----

int CmdPrepare(Context& ctx) {
  const auto& docs = ctx.Dataset();
  const fs::path root = ctx.RunDir();
  const DatasetSplit split = SplitDataset(docs, ctx.options().seed);
  WriteFile(root / "splits" / "split.tsv", SplitToTsv(split));

  const PhraseMatcher matcher(ctx.pipeline());
  std::vector<std::vector<Section>> sets;
  for (const char* code : {"T", "A", "TA", "I", "C", "Fp", "Lp", "R", "TAR",
                           "F"}) {
    sets.push_back(ParseSections(code));
  }
  const CoverageReport coverage = KeyphraseCoverage(docs, sets, matcher);
  WriteFile(root / "reports" / "coverage.tsv", CoverageToTsv(coverage));
  WriteFile(root / "reports" / "dataset_stats.tsv",
            DatasetStatsToTsv(coverage));
  ctx.Manifest();

  char avg[32];
  std::snprintf(avg, sizeof(avg), "%.3f", coverage.avg_gold_per_doc);
  ctx.out() << "documents " << docs.size() << ", train " << split.train.size()
            << ", test " << split.test.size() << ", gold phrases per doc "
            << avg << "\n";
  return kExitOk;
}

int CmdTrain(Context& ctx) {
  const Method method = SingleMethod(ctx.options().method);
  if (!IsSupervised(method)) {
    throw Error(std::string(MethodName(method)) + " does not train");
  }
  ctx.RequireSeed("training");
  const CorpusVariant variant = SingleVariant(ctx.options().corpus);
  const auto& docs = ctx.Dataset();
  const auto train = SelectDocuments(docs, ctx.Split().train);

  auto extractor = MakeExtractor(method, ctx.Params(true), ctx.pipeline());
  extractor->Train(PrepareCorpus(train, variant, ctx.pipeline()));
  std::ostringstream model;
  extractor->Save(model);
  const fs::path path = ModelPath(ctx, method, variant);
  WriteFile(path, model.str());
  ctx.Manifest();
  ctx.out() << "trained " << MethodName(method) << " on " << variant.code()
            << " (" << train.size() << " documents) -> " << path.string()
            << "\n";
  return kExitOk;
}

int CmdExtract(Context& ctx) {
  const Method method = SingleMethod(ctx.options().method);
  const CorpusVariant variant = SingleVariant(ctx.options().corpus);
  const auto top = ParseTopN(ctx.options().top);
  const auto docs = EvaluationDocs(ctx, !IsSupervised(method));

  auto extractor = MakeExtractor(method, ctx.Params(true), ctx.pipeline());
  if (IsSupervised(method)) {
    const fs::path path = ModelPath(ctx, method, variant);
    std::istringstream model(
        ReadFile(path.string(), "run `kex train` first"));
    extractor->Load(model);
    ctx.AddInput("model", path.string());
  }
  const auto extractions =
      extractor->Extract(PrepareCorpus(docs, variant, ctx.pipeline()));
  const size_t keep =
      method == Method::kCrf ? 0 : *std::max_element(top.begin(), top.end());
  const fs::path path = ExtractionPath(ctx, method, variant);
  WriteFile(path, ExtractionsToTsv(extractions, keep));
  ctx.Manifest();
  ctx.out() << "extracted " << MethodName(method) << " from " << variant.code()
            << " (" << docs.size() << " documents) -> " << path.string()
            << "\n";
  return kExitOk;
}

int CmdEval(Context& ctx) {
  const Method method = SingleMethod(ctx.options().method);
  const CorpusVariant variant = SingleVariant(ctx.options().corpus);
  const auto top = ParseTopN(ctx.options().top);
  const fs::path path = ExtractionPath(ctx, method, variant);
  const auto extractions = ParseExtractionsTsv(
      ReadFile(path.string(), "run `kex extract` first"));
  ctx.AddInput("extractions", path.string());
  const auto docs = EvaluationDocs(ctx, !IsSupervised(method));
  const PreparedCorpus corpus = PrepareCorpus(docs, variant, ctx.pipeline());
  const PhraseMatcher matcher(ctx.pipeline());

  std::vector<MatrixRow> rows;
  const std::vector<size_t> ns =
      method == Method::kCrf ? std::vector<size_t>{0} : top;
  for (size_t n : ns) {
    MatrixRow row{method, variant.code(), n, {}, {}};
    row.counts = EvaluateExtractions(corpus, extractions, n, matcher);
    row.prf = ComputePrf(row.counts);
    rows.push_back(row);
  }
  const ResultsTable table = BuildResultsTable(rows);
  WriteFile(ctx.RunDir() / "reports" /
                ("eval_" + std::string(MethodName(method)) + "_" +
                 variant.code() + ".tsv"),
            ResultsToTsv(table));
  ctx.Manifest();
  ctx.out() << ResultsToText(table);
  return kExitOk;
}

int CmdAblate(Context& ctx) {
  const Method method = SingleMethod(ctx.options().method);
  if (method != Method::kCrf) throw Error("ablation is defined for crf only");
  ctx.RequireSeed("ablation");
  const CorpusVariant variant = SingleVariant(ctx.options().corpus);
  const auto train = SelectDocuments(ctx.Dataset(), ctx.Split().train);
  const AblationResult result =
      AblateCrf(train, variant, ctx.Params(false), ctx.pipeline(),
                ctx.options().seed);
  const std::string tsv = AblationToTsv(result);
  WriteFile(ctx.RunDir() / "reports" / ("ablation_crf_" + variant.code() +
                                        ".tsv"),
            tsv);
  ctx.Manifest();
  ctx.out() << tsv;
  return kExitOk;
}

std::string PickVariant(const ResultsTable& table, const std::string& given,
                        const char* flag) {
  if (!given.empty()) return given;
  if (table.variants.size() == 1) return table.variants[0];
  std::string listed;
  for (const auto& v : table.variants) listed += (listed.empty() ? "" : ",") + v;
  throw Error(std::string(flag) + " is required: report has variants " +
              (listed.empty() ? "(none)" : listed));
}

int CmdTTest(Context& ctx) {
  const Options& o = ctx.options();
  std::vector<std::pair<double, double>> pairs;
  if (!o.pairs.empty()) {
    pairs = ParsePairsTsv(ReadFile(o.pairs));
    ctx.AddInput("pairs", o.pairs);
  } else {
    if (o.report_a.empty()) {
      throw Error("ttest needs --pairs or --report-a/--report-b");
    }
    const std::string path_b = o.report_b.empty() ? o.report_a : o.report_b;
    const ResultsTable a = ParseResultsTsv(ReadFile(o.report_a));
    const ResultsTable b = ParseResultsTsv(ReadFile(path_b));
    ctx.AddInput("report-a", o.report_a);
    ctx.AddInput("report-b", path_b);
    const std::string variant_a = PickVariant(a, o.variant_a, "--variant-a");
    const std::string variant_b = PickVariant(b, o.variant_b, "--variant-b");
    pairs = PairF1(a, variant_a, b, variant_b);
  }
  Sidedness sidedness;
  if (o.sided == "two") {
    sidedness = Sidedness::kTwoSided;
  } else if (o.sided == "one") {
    sidedness = Sidedness::kOneSided;
  } else {
    throw Error("--sided must be 'one' or 'two'");
  }
  const TTestResult result = PairedTTest(pairs, o.alpha, sidedness);
  const std::string json = TTestResultToJson(result) + "\n";
  if (!o.out.empty()) {
    WriteFile(ctx.RunDir() / "reports" / "ttest.json", json);
    ctx.Manifest();
  }
  ctx.out() << json;
  return kExitOk;
}

int CmdReport(Context& ctx) {
  const fs::path path = ctx.options().results.empty()
                            ? ctx.RunDir() / "reports" / "results.tsv"
                            : fs::path(ctx.options().results);
  const ResultsTable table = ParseResultsTsv(
      ReadFile(path.string(), "run `kex run-matrix` first"));
  const std::string text = ResultsToText(table);
  fs::path text_path = path;
  text_path.replace_extension(".txt");
  WriteFile(text_path, text);
  ctx.out() << text;
  return kExitOk;
}

int CmdRunMatrix(Context& ctx) {
  MatrixConfig config;
  config.methods = ParseMethods(ctx.options().methods);
  config.variants = ParseVariants(ctx.options().corpus);
  config.top_n = ParseTopN(ctx.options().top);
  config.params = ctx.Params(true);
  config.jobs = ctx.options().jobs;
  if (std::any_of(config.methods.begin(), config.methods.end(),
                  IsSupervised)) {
    ctx.RequireSeed("a matrix with supervised methods");
  }
  if (ctx.HasSeed()) config.seed = ctx.options().seed;

  const auto& docs = ctx.Dataset();
  const DatasetSplit split = ctx.Split();
  const auto train = SelectDocuments(docs, split.train);
  const auto test = SelectDocuments(docs, split.test);
  const MatrixResult result = RunMatrix(train, test, config, ctx.pipeline());

  const fs::path reports = ctx.RunDir() / "reports";
  const ResultsTable table = BuildResultsTable(result.rows);
  WriteFile(reports / "results.tsv", ResultsToTsv(table));
  WriteFile(reports / "results.txt", ResultsToText(table));
  WriteFile(reports / "errors.tsv", ErrorsToTsv(result.errors));
  try {
    WriteFile(reports / "timing.csv",
              TimingToCsv(TimingRatios(result.timings)));
  } catch (const Error& e) {
    ctx.err() << "kex: timing ratios skipped: " << e.what() << "\n";
  }
  ctx.Manifest();

  ctx.out() << ResultsToText(table);
  for (const CellError& e : result.errors) {
    ctx.err() << "kex: cell " << MethodName(e.method) << "/" << e.variant
              << " failed: " << e.message << "\n";
  }
  return result.ok() ? kExitOk : kExitFailure;
}

// ---- option wiring ----

void AddCorpus(CLI::App* cmd, Options& o, const std::string& help) {
  cmd->add_option("--corpus", o.corpus, help);
}

void AddExtractorOptions(CLI::App* cmd, Options& o) {
  cmd->add_option("--window", o.window, "TextRank co-occurrence window")
      ->check(CLI::Range(2, 1000));
  cmd->add_option("--damping", o.damping, "TextRank damping factor")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--max-phrase-len", o.max_phrase_len,
                  "longest candidate phrase in words")
      ->check(CLI::Range(1, 100));
  cmd->add_flag("--maximal-only", o.maximal_only,
                "keep only candidates not inside a longer candidate");
  cmd->add_option("--bins", o.bins, "Naive Bayes discretization bins")
      ->check(CLI::Range(2, 1000));
  cmd->add_option("--crf-bins", o.crf_bins, "CRF feature bins")
      ->check(CLI::Range(2, 1000));
  cmd->add_option("--features", o.features, "CRF features, e.g. F1,F6,F8");
  cmd->add_option("--l2", o.l2, "CRF L2 strength")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-epochs", o.max_epochs, "CRF training epochs")
      ->check(CLI::Range(1, 1000000));
  cmd->add_option("--split", o.split, "split manifest (default: run dir)");
}

}  // namespace

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

int Run(int argc, const char* const argv[], std::ostream& out,
        std::ostream& err) {
  Options o;
  CLI::App app{"kex: keyphrase extraction experiments", "kex"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  app.add_option("--dataset", o.dataset, "JSONL dataset");
  app.add_option("--out", o.out, "run directory");
  app.add_option("--seed", o.seed, "random seed (required for training)")
      ->default_str("");
  app.add_option("--jobs", o.jobs, "parallel matrix cells")
      ->check(CLI::Range(1, 1024));
  app.add_option("--config", o.config, "key=value config file");
  app.add_option("--stopwords", o.lexicons.stopwords,
                 "stopword list replacing the bundled one");
  app.add_option("--pos-lexicon", o.lexicons.pos_lexicon,
                 "word<TAB>TAG lexicon replacing the bundled one");
  app.add_option("--lemma-exceptions", o.lexicons.lemma_exceptions,
                 "surface<TAB>lemma list replacing the bundled one");

  app.add_subcommand(
      "prepare", "split the dataset and write coverage statistics");

  CLI::App* extract =
      app.add_subcommand("extract", "extract ranked keyphrases");
  extract->add_option("--method", o.method, "tfidf, textrank, nb or crf");
  AddCorpus(extract, o, "corpus variant, e.g. TAR");
  extract->add_option("--top", o.top, "top-N list; the largest is written");
  extract->add_option("--model", o.model, "model file (nb, crf)");
  extract->add_option("--extractions", o.extractions, "output TSV");
  AddExtractorOptions(extract, o);

  CLI::App* train = app.add_subcommand("train", "train nb or crf");
  train->add_option("--method", o.method, "nb or crf");
  AddCorpus(train, o, "corpus variant, e.g. TAR");
  train->add_option("--model", o.model, "output model file");
  AddExtractorOptions(train, o);

  CLI::App* ablate =
      app.add_subcommand("ablate", "leave-one-out CRF feature ablation");
  ablate->add_option("--method", o.method, "crf");
  AddCorpus(ablate, o, "corpus variant, e.g. TA");
  AddExtractorOptions(ablate, o);

  CLI::App* eval = app.add_subcommand(
      "eval", "score an extraction TSV against the gold phrases");
  eval->add_option("--method", o.method, "method that produced the TSV");
  AddCorpus(eval, o, "corpus variant, e.g. TAR");
  eval->add_option("--top", o.top, "top-N list");
  eval->add_option("--extractions", o.extractions, "extraction TSV");
  eval->add_option("--split", o.split, "split manifest (default: run dir)");

  CLI::App* ttest = app.add_subcommand("ttest", "paired t-test on F1 values");
  ttest->add_option("--pairs", o.pairs, "two-column TSV of (a, b) values");
  ttest->add_option("--report-a", o.report_a, "results TSV of system a");
  ttest->add_option("--report-b", o.report_b, "results TSV of system b");
  ttest->add_option("--variant-a", o.variant_a, "variant column of report a");
  ttest->add_option("--variant-b", o.variant_b, "variant column of report b");
  ttest->add_option("--alpha", o.alpha, "significance level")
      ->check(CLI::Range(0.0, 1.0));
  ttest->add_option("--sided", o.sided, "one or two");

  CLI::App* report =
      app.add_subcommand("report", "render a results TSV as a text table");
  report->add_option("--results", o.results, "results TSV");

  CLI::App* matrix = app.add_subcommand(
      "run-matrix", "run every method on every corpus variant");
  matrix->add_option("--methods", o.methods, "method list or 'all'");
  AddCorpus(matrix, o, "variant list or 'all'");
  matrix->add_option("--top", o.top, "top-N list");
  AddExtractorOptions(matrix, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* command = app.get_subcommands().front();
  try {
    if (!o.config.empty()) {
      ApplyConfig(app, *command, ParseConfig(ReadFile(o.config), o.config),
                  o.config);
    }
    Context ctx(o, app, *command, out, err);
    const std::string& name = command->get_name();
    if (name == "prepare") return CmdPrepare(ctx);
    if (name == "extract") return CmdExtract(ctx);
    if (name == "train") return CmdTrain(ctx);
    if (name == "ablate") return CmdAblate(ctx);
    if (name == "eval") return CmdEval(ctx);
    if (name == "ttest") return CmdTTest(ctx);
    if (name == "report") return CmdReport(ctx);
    if (name == "run-matrix") return CmdRunMatrix(ctx);
    throw Error("unhandled command " + name);
  } catch (const MissingFileError& e) {
    err << "kex: " << e.what() << "\n";
    return kExitMissingFile;
  } catch (const CLI::ParseError& e) {
    err << "kex: config: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "kex: error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace kex::cli
