#include "redial_bench.h"

#include <cmath>
#include <memory>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "core/baselines.hpp"
#include "core/catalog.hpp"
#include "core/common.hpp"
#include "core/config.hpp"
#include "core/corpus.hpp"
#include "core/instances.hpp"
#include "core/metrics.hpp"
#include "core/stats.hpp"

using ordered_json = nlohmann::ordered_json;

struct rb_config {
  redial::Config config;
};
struct rb_corpus {
  redial::Corpus corpus;
};
struct rb_instance_set {
  redial::InstanceSet set;
};
struct rb_catalog {
  redial::ItemCatalog catalog;
};
struct rb_prediction_set {
  redial::PredictionSet predictions;
};
struct rb_report {
  redial::MetricReport report;
};

namespace {

thread_local std::string g_last_error;

rb_status set_error(redial::ErrorCode code, const std::string& message) {
  g_last_error = message;
  return static_cast<rb_status>(static_cast<int>(code));
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
rb_status guarded(Fn&& fn) {
  try {
    fn();
    return RB_OK;
  } catch (const redial::RedialError& e) {
    return set_error(e.code(), e.what());
  } catch (const std::exception& e) {
    return set_error(redial::ErrorCode::internal, e.what());
  } catch (...) {
    return set_error(redial::ErrorCode::internal, "unknown error");
  }
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

rb_status require(bool condition, const char* what) {
  if (condition) return RB_OK;
  return set_error(redial::ErrorCode::invalid_argument, std::string("null argument: ") + what);
}

}  // namespace

extern "C" {

const char* rb_version(void) { return "1.0.0"; }

const char* rb_status_name(rb_status status) {
  switch (status) {
    case RB_OK: return "ok";
    case RB_ERR_IO: return "io";
    case RB_ERR_PARSE: return "parse";
    case RB_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RB_ERR_DUPLICATE_ID: return "duplicate_id";
    case RB_ERR_MISSING_PREDICTION: return "missing_prediction";
    case RB_ERR_FINGERPRINT_MISMATCH: return "fingerprint_mismatch";
    case RB_ERR_EMPTY_INPUT: return "empty_input";
    case RB_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* rb_last_error(void) { return g_last_error.c_str(); }

void rb_string_free(char* s) { delete[] s; }

/* --- configuration ------------------------------------------------------ */

rb_config* rb_config_new(void) { return new rb_config(); }

void rb_config_free(rb_config* config) { delete config; }

rb_status rb_config_set(rb_config* config, const char* key, const char* value) {
  if (rb_status s = require(config && key && value, "config/key/value")) return s;
  return guarded([&] { config->config.set(key, value); });
}

rb_status rb_config_load_file(rb_config* config, const char* path) {
  if (rb_status s = require(config && path, "config/path")) return s;
  return guarded([&] { config->config.load_file(path); });
}

rb_status rb_config_dump(const rb_config* config, char** out) {
  if (rb_status s = require(config && out, "config/out")) return s;
  *out = copy_string(config->config.dump());
  return RB_OK;
}

rb_status rb_config_fingerprint_hex(const rb_config* config, char** out) {
  if (rb_status s = require(config && out, "config/out")) return s;
  *out = copy_string(redial::to_hex(config->config.fingerprint()));
  return RB_OK;
}

/* --- corpus --------------------------------------------------------------- */

rb_status rb_corpus_parse_file(const char* path, const char* split, rb_corpus** out) {
  if (rb_status s = require(path && split && out, "path/split/out")) return s;
  return guarded([&] {
    auto corpus = std::make_unique<rb_corpus>();
    corpus->corpus = redial::parse_corpus(path, redial::split_from_string(split));
    *out = corpus.release();
  });
}

void rb_corpus_free(rb_corpus* corpus) { delete corpus; }

size_t rb_corpus_dialogue_count(const rb_corpus* corpus) {
  return corpus ? corpus->corpus.dialogues.size() : 0;
}

size_t rb_corpus_parse_error_count(const rb_corpus* corpus) {
  return corpus ? corpus->corpus.errors.size() : 0;
}

rb_status rb_corpus_validation_json(const rb_corpus* corpus, char** out) {
  if (rb_status s = require(corpus && out, "corpus/out")) return s;
  return guarded([&] {
    ordered_json doc;
    ordered_json errors = ordered_json::array();
    for (const redial::ParseError& e : corpus->corpus.errors) {
      errors.push_back({{"line", e.line}, {"message", e.message}});
    }
    doc["parse_errors"] = std::move(errors);
    ordered_json issues = ordered_json::object();
    for (const auto& [code, count] : redial::issue_histogram(corpus->corpus)) issues[code] = count;
    doc["issues"] = std::move(issues);
    *out = copy_string(doc.dump());
  });
}

size_t rb_corpus_drop_invalid(rb_corpus* corpus) {
  if (!corpus) return 0;
  return redial::drop_invalid_dialogues(corpus->corpus);
}

/* --- instances -------------------------------------------------------------- */

rb_status rb_instances_build(const rb_corpus* corpus, const rb_config* config,
                             rb_instance_set** out) {
  if (rb_status s = require(corpus && config && out, "corpus/config/out")) return s;
  return guarded([&] {
    auto set = std::make_unique<rb_instance_set>();
    set->set = redial::build_standard(corpus->corpus, config->config);
    *out = set.release();
  });
}

rb_status rb_instances_deduplicate(const rb_instance_set* standard, rb_instance_set** out) {
  if (rb_status s = require(standard && out, "standard/out")) return s;
  return guarded([&] {
    auto set = std::make_unique<rb_instance_set>();
    set->set = redial::deduplicate(standard->set);
    *out = set.release();
  });
}

rb_status rb_instances_mask(const rb_instance_set* set, const rb_catalog* catalog,
                            rb_instance_set** out) {
  if (rb_status s = require(set && catalog && out, "set/catalog/out")) return s;
  return guarded([&] {
    auto masked = std::make_unique<rb_instance_set>();
    redial::NegativeIdAllocator allocator;
    masked->set = redial::apply_catalog_mask(set->set, catalog->catalog, allocator);
    *out = masked.release();
  });
}

void rb_instances_free(rb_instance_set* set) { delete set; }

size_t rb_instances_count(const rb_instance_set* set) {
  return set ? set->set.instances.size() : 0;
}

double rb_instances_repetition_rate(const rb_instance_set* set) {
  if (!set) return 0.0;
  return redial::repetition_rate(set->set);
}

rb_status rb_instances_drop_log_json(const rb_instance_set* set, char** out) {
  if (rb_status s = require(set && out, "set/out")) return s;
  return guarded([&] {
    ordered_json log = ordered_json::array();
    for (const redial::DropRecord& record : set->set.drop_log) {
      log.push_back({{"instance_id", record.instance_id},
                     {"removed", record.removed},
                     {"instance_dropped", record.instance_dropped}});
    }
    *out = copy_string(log.dump());
  });
}

rb_status rb_instances_write_file(const rb_instance_set* set, const char* instances_path,
                                  const char* dialogues_path, const rb_config* config) {
  if (rb_status s = require(set && instances_path && config, "set/path/config")) return s;
  return guarded([&] {
    redial::write_instances_file(set->set, instances_path, config->config);
    if (dialogues_path) {
      redial::write_dialogue_meta_file(set->set, dialogues_path, config->config);
    }
  });
}

rb_status rb_instances_read_file(const char* instances_path, const char* dialogues_path,
                                 rb_instance_set** out) {
  if (rb_status s = require(instances_path && out, "path/out")) return s;
  return guarded([&] {
    auto set = std::make_unique<rb_instance_set>();
    set->set = redial::read_instances_file(instances_path, dialogues_path ? dialogues_path : "");
    *out = set.release();
  });
}

/* --- catalogs ------------------------------------------------------------------ */

rb_status rb_catalog_load_file(const char* path, rb_catalog** out) {
  if (rb_status s = require(path && out, "path/out")) return s;
  return guarded([&] {
    auto catalog = std::make_unique<rb_catalog>();
    catalog->catalog = redial::load_catalog(path);
    *out = catalog.release();
  });
}

rb_catalog* rb_catalog_identity(void) {
  auto* catalog = new rb_catalog();
  catalog->catalog = redial::ItemCatalog::identity();
  return catalog;
}

void rb_catalog_free(rb_catalog* catalog) { delete catalog; }

size_t rb_catalog_entry_count(const rb_catalog* catalog) {
  return catalog ? catalog->catalog.entries.size() : 0;
}

rb_status rb_coverage_json(const rb_instance_set* set, const rb_corpus* corpus,
                           const rb_catalog* catalog, char** out) {
  if (rb_status s = require(set && catalog && out, "set/catalog/out")) return s;
  return guarded([&] {
    std::set<std::int64_t> items = corpus ? redial::corpus_item_ids(corpus->corpus)
                                          : redial::instance_item_ids(set->set);
    redial::CoverageReport coverage = redial::compute_coverage(set->set, items, catalog->catalog);
    ordered_json doc;
    doc["catalog_id"] = catalog->catalog.catalog_id;
    doc["items_pct"] = coverage.items_pct;
    doc["test_data_pct"] = coverage.test_data_pct;
    doc["lenient_test_data_pct"] = coverage.lenient_test_data_pct;
    doc["corpus_item_count"] = coverage.corpus_item_count;
    doc["covered_item_count"] = coverage.covered_item_count;
    doc["instance_count"] = coverage.instance_count;
    doc["evaluable_instance_count"] = coverage.evaluable_instance_count;
    *out = copy_string(doc.dump());
  });
}

/* --- baselines -------------------------------------------------------------------- */

rb_status rb_baseline_naive(const rb_instance_set* set, const rb_config* config,
                            rb_prediction_set** out) {
  if (rb_status s = require(set && config && out, "set/config/out")) return s;
  return guarded([&] {
    auto predictions = std::make_unique<rb_prediction_set>();
    predictions->predictions = redial::run_baseline("naive", set->set, nullptr, config->config);
    predictions->predictions.source_fingerprint = set->set.fingerprint;
    predictions->predictions.source_variant = redial::to_string(set->set.variant);
    *out = predictions.release();
  });
}

rb_status rb_baseline_popularity(const rb_instance_set* set, const rb_corpus* train,
                                 const rb_config* config, rb_prediction_set** out) {
  if (rb_status s = require(set && train && config && out, "set/train/config/out")) return s;
  return guarded([&] {
    redial::InstanceSet train_standard = redial::build_standard(train->corpus, config->config);
    redial::PopularityModel model = redial::PopularityModel::fit(train_standard);
    auto predictions = std::make_unique<rb_prediction_set>();
    predictions->predictions = redial::run_baseline("popularity", set->set, &model, config->config);
    predictions->predictions.source_fingerprint = set->set.fingerprint;
    predictions->predictions.source_variant = redial::to_string(set->set.variant);
    *out = predictions.release();
  });
}

void rb_predictions_free(rb_prediction_set* predictions) { delete predictions; }

size_t rb_predictions_count(const rb_prediction_set* predictions) {
  return predictions ? predictions->predictions.predictions.size() : 0;
}

rb_status rb_predictions_write_file(const rb_prediction_set* predictions, const char* path,
                                    const rb_config* config) {
  if (rb_status s = require(predictions && path && config, "predictions/path/config")) return s;
  return guarded([&] {
    redial::write_predictions_file(predictions->predictions, path, config->config);
  });
}

rb_status rb_predictions_read_file(const char* path, rb_prediction_set** out) {
  if (rb_status s = require(path && out, "path/out")) return s;
  return guarded([&] {
    auto predictions = std::make_unique<rb_prediction_set>();
    predictions->predictions = redial::read_predictions_file(path);
    *out = predictions.release();
  });
}

/* --- scoring ------------------------------------------------------------------------ */

rb_status rb_score(const rb_instance_set* set, const rb_prediction_set* predictions,
                   const rb_config* config, int force, rb_report** out) {
  if (rb_status s = require(set && predictions && config && out, "set/predictions/config/out")) return s;
  return guarded([&] {
    redial::PredictionSet scored = predictions->predictions;
    if (force) scored.source_fingerprint = 0;
    auto report = std::make_unique<rb_report>();
    report->report = redial::score_all(set->set, scored, config->config, set->set.has_meta);
    *out = report.release();
  });
}

void rb_report_free(rb_report* report) { delete report; }

rb_status rb_report_set_name(rb_report* report, const char* name) {
  if (rb_status s = require(report && name, "report/name")) return s;
  report->report.name = name;
  return RB_OK;
}

double rb_report_recall(const rb_report* report, int k) {
  if (!report) return NAN;
  auto it = report->report.recall.find(k);
  return it == report->report.recall.end() ? NAN : it->second;
}

double rb_report_success_rate(const rb_report* report) {
  return report ? report->report.success_rate : NAN;
}

double rb_report_rdl(const rb_report* report) {
  if (!report || !report->report.has_rdl) return NAN;
  return report->report.rdl;
}

size_t rb_report_instance_count(const rb_report* report) {
  return report ? report->report.instance_count : 0;
}

size_t rb_report_dialogue_count(const rb_report* report) {
  return report ? report->report.dialogue_count : 0;
}

rb_status rb_report_to_json(const rb_report* report, char** out) {
  if (rb_status s = require(report && out, "report/out")) return s;
  *out = copy_string(redial::report_to_json(report->report));
  return RB_OK;
}

rb_status rb_report_write_json(const rb_report* report, const char* path) {
  if (rb_status s = require(report && path, "report/path")) return s;
  return guarded([&] { redial::write_report_json(report->report, path); });
}

rb_status rb_report_write_csv(const rb_report* report, const char* path) {
  if (rb_status s = require(report && path, "report/path")) return s;
  return guarded([&] { redial::write_report_csv(report->report, path); });
}

rb_status rb_reports_merge(const char* const* report_paths, size_t count, char** csv_out,
                           char** text_out) {
  if (rb_status s = require(report_paths != nullptr, "report_paths")) return s;
  return guarded([&] {
    if (count == 0) throw redial::RedialError(redial::ErrorCode::empty_input, "no reports to merge");
    std::vector<redial::MetricReport> reports;
    reports.reserve(count);
    for (size_t i = 0; i < count; ++i) {
      reports.push_back(redial::read_report_json(report_paths[i]));
    }
    if (csv_out) *csv_out = copy_string(redial::merge_reports_csv(reports));
    if (text_out) *text_out = copy_string(redial::merge_reports_text(reports));
  });
}

/* --- statistics ------------------------------------------------------------------------ */

rb_status rb_stats(const rb_corpus* train, const rb_corpus* test, const rb_config* config,
                   char** csv_out, char** text_out) {
  if (rb_status s = require(config != nullptr, "config")) return s;
  return guarded([&] {
    if (!train && !test) {
      throw redial::RedialError(redial::ErrorCode::invalid_argument, "stats needs at least one corpus");
    }
    redial::StatsTable table = redial::corpus_stats(train ? &train->corpus : nullptr,
                                                    test ? &test->corpus : nullptr, config->config);
    if (csv_out) *csv_out = copy_string(redial::stats_csv(table));
    if (text_out) *text_out = copy_string(redial::stats_text(table));
  });
}

}  // extern "C"
