// redial-bench: command-line front end for the evaluation harness.
// Talks to the core exclusively through the public C API.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "redial_bench.h"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

// Exit codes: 0 ok, 2 usage, otherwise rb_status + 2 (io=3, parse=4,
// invalid argument=5, duplicate id=6, missing prediction=7, fingerprint
// mismatch=8, empty input=9, internal=10).
int exit_code_for(rb_status status) { return static_cast<int>(status) + 2; }

[[noreturn]] void fail(rb_status status, const std::string& message) {
  ordered_json record;
  record["error"] = {{"status", rb_status_name(status)},
                     {"exit", exit_code_for(status)},
                     {"message", message}};
  std::cerr << record.dump() << std::endl;
  std::exit(exit_code_for(status));
}

void check(rb_status status) {
  if (status != RB_OK) fail(status, rb_last_error());
}

std::string owned(char* s) {
  std::string out = s ? s : "";
  rb_string_free(s);
  return out;
}

struct ConfigHandle {
  rb_config* ptr = rb_config_new();
  ~ConfigHandle() { rb_config_free(ptr); }
  void set(const std::string& key, const std::string& value) {
    check(rb_config_set(ptr, key.c_str(), value.c_str()));
  }
};

// Shared option bundle; each subcommand attaches the flags it honors.
struct CommonOpts {
  std::string config_file;
  std::string split = "test";
  std::string variant;
  std::string catalog;
  std::string k = "1,10,50";
  int sr_cutoff = 1;
  std::string rdl_denominator = "all-turns";
  std::string gt_mode = "mentioned";
  std::string recall_average = "macro";
  std::string naive_scope = "both-speakers";
  bool strict_validation = false;
};

bool supplied(CLI::App* cmd, const std::string& name) {
  const CLI::Option* opt = cmd->get_option_no_throw(name);
  return opt && opt->count() > 0;
}

void apply_options(CLI::App* cmd, const CommonOpts& opts, ConfigHandle& config) {
  if (!opts.config_file.empty()) check(rb_config_load_file(config.ptr, opts.config_file.c_str()));
  // Explicit flags win over the config file.
  if (supplied(cmd, "--split")) config.set("split", opts.split);
  if (supplied(cmd, "--variant")) config.set("variant", opts.variant);
  if (supplied(cmd, "--catalog")) config.set("catalog", opts.catalog);
  if (supplied(cmd, "--k")) config.set("k", opts.k);
  if (supplied(cmd, "--sr-cutoff")) config.set("sr-cutoff", std::to_string(opts.sr_cutoff));
  if (supplied(cmd, "--rdl-denominator")) config.set("rdl-denominator", opts.rdl_denominator);
  if (supplied(cmd, "--gt-mode")) config.set("gt-mode", opts.gt_mode);
  if (supplied(cmd, "--recall-average")) config.set("recall-average", opts.recall_average);
  if (supplied(cmd, "--naive-scope")) config.set("naive-scope", opts.naive_scope);
  if (supplied(cmd, "--strict-validation")) config.set("strict-validation", "true");
}

rb_catalog* open_catalog(const std::string& spec) {
  if (spec == "identity") return rb_catalog_identity();
  rb_catalog* catalog = nullptr;
  check(rb_catalog_load_file(spec.c_str(), &catalog));
  return catalog;
}

std::string sibling_dialogues_path(const std::string& instances_path) {
  fs::path candidate = fs::path(instances_path).parent_path() / "dialogues.jsonl";
  return fs::exists(candidate) ? candidate.string() : std::string();
}

std::string effective_config_value(rb_config* config, const std::string& key) {
  std::string dump = owned([&] {
    char* out = nullptr;
    check(rb_config_dump(config, &out));
    return out;
  }());
  std::string needle = key + "=";
  std::size_t pos = dump.find(needle);
  if (pos == std::string::npos) return "";
  std::size_t end = dump.find('\n', pos);
  return dump.substr(pos + needle.size(), end - pos - needle.size());
}

// --- build ------------------------------------------------------------------

int cmd_build(CLI::App* cmd, CommonOpts& opts, const std::string& corpus_path,
              const std::string& out_dir) {
  ConfigHandle config;
  config.set("variant", "both");  // build's own default; config file and flags override
  apply_options(cmd, opts, config);

  fs::create_directories(out_dir);

  rb_corpus* corpus = nullptr;
  check(rb_corpus_parse_file(corpus_path.c_str(), effective_config_value(config.ptr, "split").c_str(),
                             &corpus));
  size_t dropped_invalid = 0;
  if (effective_config_value(config.ptr, "strict-validation") == "true") {
    dropped_invalid = rb_corpus_drop_invalid(corpus);
  }

  rb_instance_set* standard = nullptr;
  check(rb_instances_build(corpus, config.ptr, &standard));

  std::string catalog_spec = effective_config_value(config.ptr, "catalog");
  std::string coverage_json;
  if (!catalog_spec.empty()) {
    rb_catalog* catalog = open_catalog(catalog_spec);
    rb_instance_set* masked = nullptr;
    check(rb_instances_mask(standard, catalog, &masked));
    char* coverage = nullptr;
    check(rb_coverage_json(masked, corpus, catalog, &coverage));
    coverage_json = owned(coverage);
    rb_instances_free(standard);
    standard = masked;
    rb_catalog_free(catalog);
  }

  std::string variant = effective_config_value(config.ptr, "variant");
  bool want_standard = variant == "standard" || variant == "both";
  bool want_dedup = variant == "dedup" || variant == "both";

  std::string dialogues_path = (fs::path(out_dir) / "dialogues.jsonl").string();
  std::string standard_path = (fs::path(out_dir) / "instances_standard.jsonl").string();
  std::string dedup_path = (fs::path(out_dir) / "instances_dedup.jsonl").string();

  rb_instance_set* dedup = nullptr;
  if (want_dedup) check(rb_instances_deduplicate(standard, &dedup));

  if (want_standard) {
    check(rb_instances_write_file(standard, standard_path.c_str(), dialogues_path.c_str(), config.ptr));
  }
  if (want_dedup) {
    check(rb_instances_write_file(dedup, dedup_path.c_str(),
                                  want_standard ? nullptr : dialogues_path.c_str(), config.ptr));
  }

  char* validation = nullptr;
  check(rb_corpus_validation_json(corpus, &validation));
  char* fingerprint = nullptr;
  check(rb_config_fingerprint_hex(config.ptr, &fingerprint));

  ordered_json log;
  log["artifact"] = "build_log";
  log["fingerprint"] = owned(fingerprint);
  log["corpus"] = {{"path", corpus_path},
                   {"dialogues", rb_corpus_dialogue_count(corpus)},
                   {"parse_errors", rb_corpus_parse_error_count(corpus)},
                   {"dropped_invalid", dropped_invalid}};
  log["validation"] = ordered_json::parse(owned(validation));
  log["standard_count"] = rb_instances_count(standard);
  log["repetition_rate"] = rb_instances_repetition_rate(standard);
  if (dedup) {
    char* drop_log = nullptr;
    check(rb_instances_drop_log_json(dedup, &drop_log));
    ordered_json drops = ordered_json::parse(owned(drop_log));
    size_t dropped_instances = 0;
    for (const auto& entry : drops) {
      if (entry.value("instance_dropped", false)) ++dropped_instances;
    }
    log["dedup_count"] = rb_instances_count(dedup);
    log["dedup_dropped_instances"] = dropped_instances;
    log["dedup_affected_instances"] = drops.size();
    log["dedup_drop_log"] = std::move(drops);
  }
  if (!coverage_json.empty()) log["coverage"] = ordered_json::parse(coverage_json);
  char* config_dump = nullptr;
  check(rb_config_dump(config.ptr, &config_dump));
  ordered_json config_obj = ordered_json::object();
  {
    std::string dump = owned(config_dump);
    std::size_t start = 0;
    while (start < dump.size()) {
      std::size_t end = dump.find('\n', start);
      if (end == std::string::npos) end = dump.size();
      std::string line = dump.substr(start, end - start);
      if (std::size_t eq = line.find('='); eq != std::string::npos) {
        config_obj[line.substr(0, eq)] = line.substr(eq + 1);
      }
      start = end + 1;
    }
  }
  log["config"] = std::move(config_obj);

  std::ofstream log_out(fs::path(out_dir) / "build_log.json");
  log_out << log.dump(2) << '\n';

  std::cout << "built " << rb_instances_count(standard) << " standard instance(s)";
  if (dedup) std::cout << ", " << rb_instances_count(dedup) << " dedup instance(s)";
  std::cout << " -> " << out_dir << std::endl;

  rb_instances_free(standard);
  if (dedup) rb_instances_free(dedup);
  rb_corpus_free(corpus);
  return 0;
}

// --- mask --------------------------------------------------------------------

int cmd_mask(CLI::App* cmd, CommonOpts& opts, const std::string& instances_path,
             const std::string& dialogues_path, const std::string& out_instances,
             const std::string& out_dialogues, const std::string& corpus_path) {
  ConfigHandle config;
  apply_options(cmd, opts, config);
  std::string catalog_spec = effective_config_value(config.ptr, "catalog");
  if (catalog_spec.empty()) {
    fail(RB_ERR_INVALID_ARGUMENT, "mask requires --catalog (path or 'identity')");
  }

  std::string meta_path = dialogues_path.empty() ? sibling_dialogues_path(instances_path)
                                                 : dialogues_path;
  rb_instance_set* set = nullptr;
  check(rb_instances_read_file(instances_path.c_str(),
                               meta_path.empty() ? nullptr : meta_path.c_str(), &set));

  rb_catalog* catalog = open_catalog(catalog_spec);
  rb_instance_set* masked = nullptr;
  check(rb_instances_mask(set, catalog, &masked));

  // Deduplication after masking keeps uncovered ground truth as guaranteed
  // misses instead of silently dropping it with the context mention.
  if (effective_config_value(config.ptr, "variant") == "dedup") {
    rb_instance_set* deduped = nullptr;
    check(rb_instances_deduplicate(masked, &deduped));
    rb_instances_free(masked);
    masked = deduped;
  }

  rb_corpus* corpus = nullptr;
  if (!corpus_path.empty()) {
    check(rb_corpus_parse_file(corpus_path.c_str(),
                               effective_config_value(config.ptr, "split").c_str(), &corpus));
  }
  char* coverage = nullptr;
  check(rb_coverage_json(masked, corpus, catalog, &coverage));
  std::cout << owned(coverage) << std::endl;

  check(rb_instances_write_file(masked, out_instances.c_str(),
                                out_dialogues.empty() ? nullptr : out_dialogues.c_str(),
                                config.ptr));

  if (corpus) rb_corpus_free(corpus);
  rb_catalog_free(catalog);
  rb_instances_free(masked);
  rb_instances_free(set);
  return 0;
}

// --- stats --------------------------------------------------------------------

int cmd_stats(CLI::App* cmd, CommonOpts& opts, const std::string& train_path,
              const std::string& test_path, const std::string& out_csv,
              const std::string& out_text) {
  ConfigHandle config;
  apply_options(cmd, opts, config);
  if (train_path.empty() && test_path.empty()) {
    fail(RB_ERR_INVALID_ARGUMENT, "stats needs --train and/or --test");
  }

  bool strict = effective_config_value(config.ptr, "strict-validation") == "true";
  rb_corpus* train = nullptr;
  rb_corpus* test = nullptr;
  if (!train_path.empty()) {
    check(rb_corpus_parse_file(train_path.c_str(), "train", &train));
    if (strict) rb_corpus_drop_invalid(train);
  }
  if (!test_path.empty()) {
    check(rb_corpus_parse_file(test_path.c_str(), "test", &test));
    if (strict) rb_corpus_drop_invalid(test);
  }

  char* csv = nullptr;
  char* text = nullptr;
  check(rb_stats(train, test, config.ptr, &csv, &text));
  std::string csv_str = owned(csv);
  std::string text_str = owned(text);
  std::cout << text_str;
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << csv_str;
  }
  if (!out_text.empty()) {
    std::ofstream out(out_text);
    out << text_str;
  }
  if (train) rb_corpus_free(train);
  if (test) rb_corpus_free(test);
  return 0;
}

// --- baseline -----------------------------------------------------------------

int cmd_baseline(CLI::App* cmd, CommonOpts& opts, const std::string& name,
                 std::string instances_path, const std::string& dir,
                 const std::string& train_corpus, std::string out_path) {
  ConfigHandle config;
  apply_options(cmd, opts, config);

  if (instances_path.empty()) {
    std::string variant = supplied(cmd, "--variant") ? opts.variant : "standard";
    instances_path = (fs::path(dir) / ("instances_" + variant + ".jsonl")).string();
  }
  std::string meta_path = sibling_dialogues_path(instances_path);

  rb_instance_set* set = nullptr;
  check(rb_instances_read_file(instances_path.c_str(),
                               meta_path.empty() ? nullptr : meta_path.c_str(), &set));

  rb_prediction_set* predictions = nullptr;
  if (name == "naive") {
    check(rb_baseline_naive(set, config.ptr, &predictions));
  } else if (name == "popularity") {
    if (train_corpus.empty()) {
      fail(RB_ERR_INVALID_ARGUMENT, "popularity baseline requires --train-corpus");
    }
    rb_corpus* train = nullptr;
    check(rb_corpus_parse_file(train_corpus.c_str(), "train", &train));
    check(rb_baseline_popularity(set, train, config.ptr, &predictions));
    rb_corpus_free(train);
  } else {
    fail(RB_ERR_INVALID_ARGUMENT, "unknown baseline: " + name + " (expected naive|popularity)");
  }

  if (out_path.empty()) {
    out_path = (fs::path(instances_path).parent_path() / ("predictions_" + name + ".jsonl")).string();
  }
  check(rb_predictions_write_file(predictions, out_path.c_str(), config.ptr));
  std::cout << "wrote " << rb_predictions_count(predictions) << " prediction(s) -> " << out_path
            << std::endl;
  rb_predictions_free(predictions);
  rb_instances_free(set);
  return 0;
}

// --- score --------------------------------------------------------------------

int cmd_score(CLI::App* cmd, CommonOpts& opts, std::string instances_path,
              const std::string& dir, const std::string& predictions_path,
              std::string dialogues_path, bool force, std::string name,
              std::string out_report, const std::string& out_csv) {
  ConfigHandle config;
  apply_options(cmd, opts, config);

  if (instances_path.empty()) {
    std::string variant = supplied(cmd, "--variant") ? opts.variant : "standard";
    instances_path = (fs::path(dir) / ("instances_" + variant + ".jsonl")).string();
  }
  if (dialogues_path.empty()) dialogues_path = sibling_dialogues_path(instances_path);

  rb_instance_set* set = nullptr;
  check(rb_instances_read_file(instances_path.c_str(),
                               dialogues_path.empty() ? nullptr : dialogues_path.c_str(), &set));
  rb_prediction_set* predictions = nullptr;
  check(rb_predictions_read_file(predictions_path.c_str(), &predictions));

  rb_report* report = nullptr;
  check(rb_score(set, predictions, config.ptr, force ? 1 : 0, &report));

  if (name.empty()) name = fs::path(predictions_path).stem().string();
  check(rb_report_set_name(report, name.c_str()));

  char* json_text = nullptr;
  check(rb_report_to_json(report, &json_text));
  std::cout << owned(json_text);

  if (out_report.empty()) {
    out_report = (fs::path(instances_path).parent_path() / ("report_" + name + ".json")).string();
  }
  check(rb_report_write_json(report, out_report.c_str()));
  if (!out_csv.empty()) check(rb_report_write_csv(report, out_csv.c_str()));

  rb_report_free(report);
  rb_predictions_free(predictions);
  rb_instances_free(set);
  return 0;
}

// --- report -------------------------------------------------------------------

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_csv,
               const std::string& out_text) {
  if (inputs.empty()) fail(RB_ERR_EMPTY_INPUT, "report needs at least one input report");
  std::vector<const char*> paths;
  paths.reserve(inputs.size());
  for (const std::string& path : inputs) paths.push_back(path.c_str());

  char* csv = nullptr;
  char* text = nullptr;
  check(rb_reports_merge(paths.data(), paths.size(), &csv, &text));
  std::string csv_str = owned(csv);
  std::string text_str = owned(text);
  std::cout << text_str;
  if (!out_csv.empty()) {
    std::ofstream out(out_csv);
    out << csv_str;
  }
  if (!out_text.empty()) {
    std::ofstream out(out_text);
    out << text_str;
  }
  return 0;
}

void attach_common(CLI::App* cmd, CommonOpts& opts, bool with_metrics) {
  cmd->add_option("--config", opts.config_file, "JSON config file (flags take precedence)");
  cmd->add_option("--gt-mode", opts.gt_mode, "ground-truth rule")
      ->check(CLI::IsMember({"mentioned", "suggested-only"}));
  cmd->add_flag("--strict-validation", opts.strict_validation,
                "drop dialogues with validation issues");
  if (with_metrics) {
    cmd->add_option("--k", opts.k, "recall cutoffs, comma separated");
    cmd->add_option("--sr-cutoff", opts.sr_cutoff, "success-rate / RDL cutoff")
        ->check(CLI::Range(1, 50));
    cmd->add_option("--rdl-denominator", opts.rdl_denominator, "RDL turn denominator")
        ->check(CLI::IsMember({"all-turns", "recommender-turns"}));
    cmd->add_option("--recall-average", opts.recall_average, "recall averaging mode")
        ->check(CLI::IsMember({"macro", "micro"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"redial-bench: standardized evaluation harness for conversational recommenders"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rb_version()));

  // build
  CommonOpts build_opts;
  std::string build_corpus, build_out = "out";
  CLI::App* build = app.add_subcommand("build", "corpus -> instance files (standard + dedup)");
  build->add_option("--corpus", build_corpus, "line-delimited corpus file")->required();
  build->add_option("--split", build_opts.split, "which split the corpus holds")
      ->check(CLI::IsMember({"train", "test"}));
  build->add_option("--variant", build_opts.variant, "which variant files to write")
      ->check(CLI::IsMember({"standard", "dedup", "both"}));
  build->add_option("--catalog", build_opts.catalog, "mask with this catalog (path or 'identity')");
  build->add_option("--out-dir", build_out, "output directory");
  attach_common(build, build_opts, false);

  // mask
  CommonOpts mask_opts;
  std::string mask_instances, mask_dialogues, mask_out_instances, mask_out_dialogues, mask_corpus;
  CLI::App* mask = app.add_subcommand("mask", "apply an item catalog to an instance file");
  mask->add_option("--instances", mask_instances, "instance file to mask")->required();
  mask->add_option("--dialogues", mask_dialogues, "dialogue metadata file (default: sibling)");
  mask->add_option("--catalog", mask_opts.catalog, "catalog path or 'identity'")->required();
  mask->add_option("--variant", mask_opts.variant, "deduplicate after masking when 'dedup'")
      ->check(CLI::IsMember({"standard", "dedup"}));
  mask->add_option("--out-instances", mask_out_instances, "masked instance file")->required();
  mask->add_option("--out-dialogues", mask_out_dialogues, "masked dialogue metadata file");
  mask->add_option("--corpus", mask_corpus, "corpus for the coverage item universe");
  mask->add_option("--split", mask_opts.split, "split of --corpus")
      ->check(CLI::IsMember({"train", "test"}));
  attach_common(mask, mask_opts, false);

  // stats
  CommonOpts stats_opts;
  std::string stats_train, stats_test, stats_csv, stats_text;
  CLI::App* stats = app.add_subcommand("stats", "dataset statistics and repetition rate");
  stats->add_option("--train", stats_train, "train split corpus file");
  stats->add_option("--test", stats_test, "test split corpus file");
  stats->add_option("--out-csv", stats_csv, "write the table as CSV");
  stats->add_option("--out-text", stats_text, "write the table as text");
  attach_common(stats, stats_opts, false);

  // baseline
  CommonOpts baseline_opts;
  std::string baseline_name, baseline_instances, baseline_dir = "out", baseline_train, baseline_out;
  CLI::App* baseline = app.add_subcommand("baseline", "run a reference recommender");
  baseline->add_option("--name", baseline_name, "naive | popularity")->required();
  baseline->add_option("--instances", baseline_instances, "instance file (overrides --dir)");
  baseline->add_option("--dir", baseline_dir, "directory holding build outputs");
  baseline->add_option("--variant", baseline_opts.variant, "variant to pick from --dir")
      ->check(CLI::IsMember({"standard", "dedup"}));
  baseline->add_option("--train-corpus", baseline_train, "train corpus (popularity only)");
  baseline->add_option("--out", baseline_out, "prediction file to write");
  baseline->add_option("--naive-scope", baseline_opts.naive_scope, "which speakers' mentions count")
      ->check(CLI::IsMember({"both-speakers", "seeker-only"}));
  baseline->add_option("--k", baseline_opts.k, "list depth for popularity = max cutoff");
  attach_common(baseline, baseline_opts, false);

  // score
  CommonOpts score_opts;
  std::string score_instances, score_dir = "out", score_predictions, score_dialogues, score_name;
  std::string score_report, score_csv;
  bool score_force = false;
  CLI::App* score = app.add_subcommand("score", "score a prediction file against instances");
  score->add_option("--instances", score_instances, "instance file (overrides --dir)");
  score->add_option("--dir", score_dir, "directory holding build outputs");
  score->add_option("--variant", score_opts.variant, "variant to pick from --dir")
      ->check(CLI::IsMember({"standard", "dedup"}));
  score->add_option("--predictions", score_predictions, "prediction file")->required();
  score->add_option("--dialogues", score_dialogues, "dialogue metadata file (default: sibling)");
  score->add_flag("--force", score_force, "ignore artifact fingerprint mismatches");
  score->add_option("--name", score_name, "label for the report (default: prediction file stem)");
  score->add_option("--out-report", score_report, "report JSON path");
  score->add_option("--out-csv", score_csv, "flat CSV path");
  attach_common(score, score_opts, true);

  // report
  std::vector<std::string> report_inputs;
  std::string report_csv, report_text;
  CLI::App* report = app.add_subcommand("report", "merge score reports into one table");
  report->add_option("--inputs", report_inputs, "report JSON files")->required()->expected(-1);
  report->add_option("--out-csv", report_csv, "comparison table as CSV");
  report->add_option("--out-text", report_text, "comparison table as text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help / --version
    ordered_json record;
    record["error"] = {{"status", "usage"}, {"exit", 2}, {"message", e.what()}};
    std::cerr << record.dump() << std::endl;
    return 2;
  }

  try {
    if (build->parsed()) return cmd_build(build, build_opts, build_corpus, build_out);
    if (mask->parsed()) {
      return cmd_mask(mask, mask_opts, mask_instances, mask_dialogues, mask_out_instances,
                      mask_out_dialogues, mask_corpus);
    }
    if (stats->parsed()) return cmd_stats(stats, stats_opts, stats_train, stats_test, stats_csv, stats_text);
    if (baseline->parsed()) {
      return cmd_baseline(baseline, baseline_opts, baseline_name, baseline_instances, baseline_dir,
                          baseline_train, baseline_out);
    }
    if (score->parsed()) {
      return cmd_score(score, score_opts, score_instances, score_dir, score_predictions,
                       score_dialogues, score_force, score_name, score_report, score_csv);
    }
    if (report->parsed()) return cmd_report(report_inputs, report_csv, report_text);
  } catch (const std::exception& e) {
    fail(RB_ERR_INTERNAL, e.what());
  }
  return 0;
}
