// Copyright 2026 The WERd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "werd/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "werd/align.hpp"
#include "werd/error.hpp"
#include "werd/metrics.hpp"
#include "werd/miner.hpp"
#include "werd/segment_io.hpp"
#include "werd/textnorm.hpp"
#include "werd/variants.hpp"

namespace werd::cli {

namespace {

namespace fs = std::filesystem;

// Writes to `<path>.partial` and renames on commit; an uncommitted file is
// deleted on destruction.
class OutputFile {
 public:
  explicit OutputFile(fs::path path) : path_(std::move(path)), partial_(path_) {
    partial_ += ".partial";
    stream_.open(partial_, std::ios::binary);
    if (!stream_) throw DataError(path_.string() + ": cannot open for writing");
  }
  ~OutputFile() {
    if (!committed_) {
      stream_.close();
      std::error_code ec;
      fs::remove(partial_, ec);
    }
  }
  OutputFile(const OutputFile&) = delete;
  OutputFile& operator=(const OutputFile&) = delete;

  std::ostream& stream() { return stream_; }

  void commit() {
    stream_.flush();
    if (!stream_) throw DataError(path_.string() + ": write failure");
    stream_.close();
    fs::rename(partial_, path_);
    committed_ = true;
  }

 private:
  fs::path path_;
  fs::path partial_;
  std::ofstream stream_;
  bool committed_ = false;
};

// Removes already-committed outputs if a later step of the command fails.
class CommittedOutputs {
 public:
  void add(fs::path p) { paths_.push_back(std::move(p)); }
  void release() { paths_.clear(); }
  ~CommittedOutputs() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

struct NormFlags {
  bool no_urls = false;
  bool no_mentions = false;
  bool no_emoticons = false;
  bool no_hashtags = false;
  bool keep_diacritics = false;
  bool keep_tatweel = false;
  bool no_arabic_surface = false;
  int repetition_cap = 3;

  void add_to(CLI::App& app) {
    app.add_flag("--no-urls", no_urls, "Keep URLs instead of replacing them with <URL>");
    app.add_flag("--no-mentions", no_mentions, "Keep @mentions instead of replacing them with <USER>");
    app.add_flag("--no-emoticons", no_emoticons, "Keep emoticons/emoji instead of replacing them with <EMO>");
    app.add_flag("--no-hashtags", no_hashtags, "Leave hashtags wrapped");
    app.add_flag("--keep-diacritics", keep_diacritics, "Do not strip Arabic diacritics");
    app.add_flag("--keep-tatweel", keep_tatweel, "Do not strip tatweel");
    app.add_flag("--no-arabic-surface", no_arabic_surface, "Disable alef/yah/hah folding");
    app.add_option("--repetition-cap", repetition_cap, "Longest allowed run of one character")
        ->check(CLI::PositiveNumber);
  }

  NormalizationConfig config() const {
    NormalizationConfig c;
    c.replace_urls = !no_urls;
    c.replace_mentions = !no_mentions;
    c.replace_emoticons = !no_emoticons;
    c.unwrap_hashtags = !no_hashtags;
    c.strip_diacritics = !keep_diacritics;
    c.strip_tatweel = !keep_tatweel;
    c.arabic_surface = !no_arabic_surface;
    c.repetition_cap = repetition_cap;
    return c;
  }
};

std::string describe(const NormalizationConfig& c) {
  std::string s;
  auto flag = [&](const char* name, bool on) { s += std::string(s.empty() ? "" : ",") + name + (on ? "=1" : "=0"); };
  flag("urls", c.replace_urls);
  flag("mentions", c.replace_mentions);
  flag("emoticons", c.replace_emoticons);
  flag("hashtags", c.unwrap_hashtags);
  flag("diacritics", c.strip_diacritics);
  flag("tatweel", c.strip_tatweel);
  flag("surface", c.arabic_surface);
  s += ",cap=" + std::to_string(c.repetition_cap);
  return s;
}

struct MineArgs {
  std::vector<std::string> inputs;
  std::string out;
  MiningConfig cfg;
  std::string distance_mode = "min";
  unsigned jobs = 1;
  std::string spill_dir;
  std::size_t max_entries = 4'000'000;
  NormFlags norm;
};

struct FilterArgs {
  std::string table;
  double max_ed = 0.6;
  std::string out;
};

struct ScoreArgs {
  std::string metric = "wer";
  std::string hyp;
  std::vector<std::string> refs;
  std::string table;
  double max_ed = 0.6;
  std::string variant_cost = "table";
  std::string report;
  std::string align_dump;
  std::size_t sample = 0;
  std::string sample_out;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool stamp = false;
  NormFlags norm;
};

struct SweepArgs {
  std::vector<double> thresholds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::string hyp;
  std::string ref;
  std::string table;
  std::string variant_cost = "table";
  std::string out;
  unsigned jobs = 1;
  NormFlags norm;
};

struct NormalizeArgs {
  std::string input;
  std::string out;
  bool tsv = false;
  NormFlags norm;
};

void warn_on_normalization_mismatch(const VariantTable& table, const NormalizationConfig& scoring, std::ostream& err) {
  if (table.meta().normalization && !(*table.meta().normalization == scoring))
    err << "warning: variant table was mined with normalization {" << describe(*table.meta().normalization)
        << "} but scoring uses {" << describe(scoring) << "}\n";
}

void print_summary(std::ostream& out, const ScoreReport& report) {
  const OpCounts c = report.total_counts();
  std::string label = report.metric;
  for (char& ch : label) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  char value[64];
  std::snprintf(value, sizeof value, "%.2f", report.value);
  out << label << ": " << value << " [ " << format_decimal(report.total_cost, 4) << "/" << report.total_ref_len
      << "; " << c.ins << " insertions, " << c.del << " deletions, " << c.sub << " substitutions, " << c.variant
      << " variant matches ]\n";
  if (report.empty_refs) out << "note: " << report.empty_refs << " segment(s) have an empty reference\n";
}

int do_mine(const MineArgs& a, std::ostream& out, std::ostream& err) {
  MiningConfig cfg = a.cfg;
  cfg.distance_mode = parse_distance_mode(a.distance_mode);
  validate(cfg);
  MiningOptions options;
  options.jobs = a.jobs;
  options.counter.spill_dir = a.spill_dir;
  options.counter.max_entries = a.max_entries;
  std::vector<fs::path> inputs(a.inputs.begin(), a.inputs.end());
  const MiningResult result = mine(inputs, cfg, a.norm.config(), options);
  if (result.stats.capped_contexts)
    err << "warning: " << result.stats.capped_contexts << " context(s) exceeded the fan-out cap of " << cfg.fanout_cap
        << " targets; only the most frequent were paired\n";

  CommittedOutputs committed;
  OutputFile table_file(a.out);
  write_table(table_file.stream(), result.table);
  table_file.commit();
  committed.add(a.out);
  save_meta(result.table.meta(), meta_path(a.out));
  committed.release();

  out << "pairs=" << result.table.size() << "\tlines=" << result.stats.lines
      << "\tobservations=" << result.stats.observations << "\tcontexts=" << result.stats.contexts
      << "\tcandidates=" << result.stats.candidate_pairs << "\tspilled_runs=" << result.stats.spilled_runs << '\n';
  return kExitOk;
}

int do_filter(const FilterArgs& a, std::ostream& out) {
  const VariantTable sub = filter(load(a.table), a.max_ed);
  CommittedOutputs committed;
  OutputFile file(a.out);
  write_table(file.stream(), sub);
  file.commit();
  committed.add(a.out);
  save_meta(sub.meta(), meta_path(a.out));
  committed.release();
  out << "pairs=" << sub.size() << "\tmax_ed=" << format_score(a.max_ed) << '\n';
  return kExitOk;
}

int do_classify(const std::string& table_path, std::ostream& out) {
  const VariantTable table = load(table_path);
  if (table.empty()) throw DataError(table_path + ": table is empty; nothing to classify");
  const ClassHistogram h = class_histogram(table);
  for (VariantClass cls : {VariantClass::kSplitting, VariantClass::kMerging, VariantClass::kSubstitution}) {
    const std::size_t n = cls == VariantClass::kSplitting ? h.splitting
                          : cls == VariantClass::kMerging ? h.merging
                                                          : h.substitution;
    out << to_string(cls) << '\t' << n << '\t' << format_decimal(h.percent(cls), 2) << "%\n";
  }
  out << "total\t" << h.total << '\n';
  return kExitOk;
}

int do_score(const ScoreArgs& a, std::ostream& out, std::ostream& err) {
  const Metric metric = parse_metric(a.metric);
  const CostMode cost = CostMode::parse(a.variant_cost);
  if (metric != Metric::kMrWer && a.refs.size() != 1)
    throw CLI::ValidationError("--ref", "metric " + a.metric + " takes exactly one reference file");
  if (metric == Metric::kWerd && a.table.empty()) throw CLI::RequiredError("--table (required for werd)");

  const NormalizationConfig norm = a.norm.config();
  const std::vector<Segment> hyps = read_segments(a.hyp, norm);

  ScoreReport report;
  if (metric == Metric::kMrWer) {
    std::vector<std::vector<Segment>> ref_sets;
    for (const auto& r : a.refs) ref_sets.push_back(read_segments(r, norm));
    report = mr_wer(hyps, ref_sets, a.jobs);
  } else {
    const std::vector<Segment> refs = read_segments(a.refs.front(), norm);
    std::optional<VariantTable> table;
    if (metric == Metric::kWerd) {
      VariantTable full = load(a.table);
      warn_on_normalization_mismatch(full, norm, err);
      table = filter(full, a.max_ed);
    }
    report = score_corpus(hyps, refs, MetricSpec{metric, table ? &*table : nullptr, cost, a.jobs});
    if (table) report.config["table"] = a.table;
  }
  report.config["normalization"] = describe(norm);
  if (a.stamp) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    report.config["timestamp"] = buf;
  }

  CommittedOutputs committed;
  std::optional<OutputFile> report_file, dump_file, sample_file;
  if (!a.report.empty()) {
    report_file.emplace(a.report);
    write_report(report_file->stream(), report);
  }
  if (!a.align_dump.empty()) {
    dump_file.emplace(a.align_dump);
    for (const SegmentScore& s : report.segments) render_alignment(dump_file->stream(), s.id, s.hyp, s.ref, s.alignment);
  }
  if (a.sample > 0) {
    if (a.sample_out.empty()) throw CLI::RequiredError("--sample-out (required with --sample)");
    sample_file.emplace(a.sample_out);
    const std::vector<VariantMatch> all = collect_matches(report);
    for (const VariantMatch& m : sample_matches(all, a.sample, a.seed))
      sample_file->stream() << m.segment_id << '\t' << m.hyp.joined() << '\t' << m.ref.joined() << '\t'
                            << format_score(m.score) << '\n';
  }
  for (auto* f : {&report_file, &dump_file, &sample_file}) {
    if (!*f) continue;
    (*f)->commit();
  }
  if (report_file) committed.add(a.report);
  if (dump_file) committed.add(a.align_dump);
  if (sample_file) committed.add(a.sample_out);
  committed.release();

  print_summary(out, report);
  return kExitOk;
}

int do_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const CostMode cost = CostMode::parse(a.variant_cost);
  const NormalizationConfig norm = a.norm.config();
  const std::vector<Segment> hyps = read_segments(a.hyp, norm);
  const std::vector<Segment> refs = read_segments(a.ref, norm);
  const VariantTable table = load(a.table);
  warn_on_normalization_mismatch(table, norm, err);
  const ScoreReport wer = score_corpus(hyps, refs, MetricSpec{Metric::kWer, nullptr, cost, a.jobs});
  const auto points = threshold_sweep(hyps, refs, table, a.thresholds, cost, a.jobs);

  std::ostringstream body;
  body << "# wer=" << format_decimal(wer.value, 4) << "\tcost_mode=" << cost.to_string() << '\n';
  body << "threshold\twerd\tvariant_matches\ttable_pairs\n";
  for (const SweepPoint& p : points)
    body << format_score(p.threshold) << '\t' << format_decimal(p.report.value, 4) << '\t' << p.variant_matches
         << '\t' << p.table_pairs << '\n';
  if (!a.out.empty()) {
    OutputFile file(a.out);
    file.stream() << body.str();
    file.commit();
  }
  out << body.str();
  return kExitOk;
}

int do_correlate(const std::string& path_a, const std::string& path_b, std::ostream& out) {
  auto read = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError(p + ": cannot open report");
    return read_report(in, p);
  };
  const auto rows_a = read(path_a);
  const auto rows_b = read(path_b);
  CorrelationResult r = pearson(segment_rates(rows_a), segment_rates(rows_b));
  r.name_a = path_a;
  r.name_b = path_b;
  out << "pearson\tn=" << r.n << "\tr=";
  if (r.r)
    out << format_decimal(*r.r, 6);
  else
    out << "undefined (zero variance)";
  out << '\n';
  return kExitOk;
}

int do_normalize(const NormalizeArgs& a, std::ostream& out) {
  const NormalizationConfig norm = a.norm.config();
  validate(norm);
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw DataError(a.input + ": cannot open input");
  OutputFile file(a.out);
  std::size_t lines = 0;
  for_each_line(in, [&](const std::string& line) {
    ++lines;
    if (a.tsv) {
      const std::size_t tab = line.find('\t');
      if (tab == std::string::npos) throw DataError(a.input, lines, "expected <id>\\t<text>");
      file.stream() << line.substr(0, tab) << '\t' << join(normalize_text(std::string_view(line).substr(tab + 1), norm)) << '\n';
    } else {
      file.stream() << join(normalize_text(line, norm)) << '\n';
    }
  });
  if (in.bad()) throw DataError(a.input + ": read failure");
  file.commit();
  out << "lines=" << lines << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spelling-variant mining and dialect-aware ASR scoring (WER, WERd, TER, MR-WER)", "werd"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  MineArgs mine_args;
  auto* mine_cmd = app.add_subcommand("mine", "Mine spelling-variant pairs from plain-text corpora");
  mine_cmd->add_option("--input", mine_args.inputs, "Corpus files, one document per line")->required()->expected(1, -1);
  mine_cmd->add_option("--out", mine_args.out, "Output variant table (TSV)")->required();
  mine_cmd->add_option("--max-distance", mine_args.cfg.max_distance, "Normalized edit distance gate t")->capture_default_str();
  mine_cmd->add_option("--ratio", mine_args.cfg.ratio, "Frequency ratio N")->capture_default_str();
  mine_cmd->add_option("--nmin", mine_args.cfg.n_min, "Shortest n-gram")->capture_default_str();
  mine_cmd->add_option("--nmax", mine_args.cfg.n_max, "Longest n-gram")->capture_default_str();
  mine_cmd->add_option("--distance-mode", mine_args.distance_mode, "min|avg")->check(CLI::IsMember({"min", "avg"}))->capture_default_str();
  mine_cmd->add_option("--min-contexts", mine_args.cfg.min_pair_contexts, "Shared contexts required per pair")->capture_default_str();
  mine_cmd->add_option("--fanout-cap", mine_args.cfg.fanout_cap, "Distinct targets paired per context")->capture_default_str();
  mine_cmd->add_option("--jobs", mine_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  mine_cmd->add_option("--spill-dir", mine_args.spill_dir, "Directory for sorted count runs");
  mine_cmd->add_option("--max-entries", mine_args.max_entries, "In-memory (context, target) entries before spilling")
      ->check(CLI::PositiveNumber);
  mine_args.norm.add_to(*mine_cmd);

  FilterArgs filter_args;
  auto* filter_cmd = app.add_subcommand("filter", "Keep pairs with score <= --max-ed");
  filter_cmd->add_option("--table", filter_args.table)->required();
  filter_cmd->add_option("--max-ed", filter_args.max_ed)->required()->check(CLI::NonNegativeNumber);
  filter_cmd->add_option("--out", filter_args.out)->required();

  std::string classify_table;
  auto* classify_cmd = app.add_subcommand("classify", "Split/merge/substitution histogram of a table");
  classify_cmd->add_option("--table", classify_table)->required();

  ScoreArgs score_args;
  auto* score_cmd = app.add_subcommand("score", "Score hypotheses against references");
  score_cmd->add_option("--metric", score_args.metric, "wer|werd|ter|mrwer")
      ->check(CLI::IsMember({"wer", "werd", "ter", "mrwer"}))->capture_default_str();
  score_cmd->add_option("--hyp", score_args.hyp, "Hypothesis segments (<id>\\t<text>)")->required();
  score_cmd->add_option("--ref", score_args.refs, "Reference segments; comma-separated list for mrwer")
      ->required()->delimiter(',');
  score_cmd->add_option("--table", score_args.table, "Variant table (werd)");
  score_cmd->add_option("--max-ed", score_args.max_ed, "Use pairs with score <= this")->check(CLI::NonNegativeNumber)->capture_default_str();
  score_cmd->add_option("--variant-cost", score_args.variant_cost, "table|zero|const:<x>")->capture_default_str();
  score_cmd->add_option("--report", score_args.report, "Per-segment report (TSV)");
  score_cmd->add_option("--align-dump", score_args.align_dump, "Alignment rendering");
  score_cmd->add_option("--sample", score_args.sample, "Sample this many variant matches for manual audit");
  score_cmd->add_option("--sample-out", score_args.sample_out, "Where to write the sampled matches");
  score_cmd->add_option("--seed", score_args.seed, "Sampling seed")->capture_default_str();
  score_cmd->add_option("--jobs", score_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  score_cmd->add_flag("--stamp", score_args.stamp, "Add a timestamp to the report config line");
  score_args.norm.add_to(*score_cmd);

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "WERd across variant-table thresholds");
  sweep_cmd->add_option("--thresholds", sweep_args.thresholds, "Ascending thresholds")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--hyp", sweep_args.hyp)->required();
  sweep_cmd->add_option("--ref", sweep_args.ref)->required();
  sweep_cmd->add_option("--table", sweep_args.table)->required();
  sweep_cmd->add_option("--variant-cost", sweep_args.variant_cost, "table|zero|const:<x>")->capture_default_str();
  sweep_cmd->add_option("--out", sweep_args.out, "Also write the sweep table here");
  sweep_cmd->add_option("--jobs", sweep_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep_args.norm.add_to(*sweep_cmd);

  std::string corr_a, corr_b;
  auto* correlate_cmd = app.add_subcommand("correlate", "Pearson correlation of two per-segment reports");
  correlate_cmd->add_option("--a", corr_a)->required();
  correlate_cmd->add_option("--b", corr_b)->required();

  NormalizeArgs norm_args;
  auto* normalize_cmd = app.add_subcommand("normalize", "Normalize raw text, one line at a time");
  normalize_cmd->add_option("--input", norm_args.input)->required();
  normalize_cmd->add_option("--out", norm_args.out)->required();
  normalize_cmd->add_flag("--tsv", norm_args.tsv, "Input is <id>\\t<text>; keep the id column");
  norm_args.norm.add_to(*normalize_cmd);

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  if (!args.empty()) args.pop_back();  // program name
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*mine_cmd) return do_mine(mine_args, out, err);
    if (*filter_cmd) return do_filter(filter_args, out);
    if (*classify_cmd) return do_classify(classify_table, out);
    if (*score_cmd) return do_score(score_args, out, err);
    if (*sweep_cmd) return do_sweep(sweep_args, out, err);
    if (*correlate_cmd) return do_correlate(corr_a, corr_b, out);
    if (*normalize_cmd) return do_normalize(norm_args, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace werd::cli
