#include "core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace redial {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const RankedPrediction* PredictionSet::find(const std::string& instance_id) const {
  auto it = index.find(instance_id);
  if (it == index.end()) return nullptr;
  return &predictions[it->second];
}

void PredictionSet::add(RankedPrediction prediction) {
  if (index.count(prediction.instance_id)) {
    throw RedialError(ErrorCode::duplicate_id,
                      "duplicate prediction for instance " + prediction.instance_id);
  }
  index.emplace(prediction.instance_id, predictions.size());
  predictions.push_back(std::move(prediction));
}

double recall_at_k(const RankedPrediction& prediction, const EvaluationInstance& instance, int k) {
  if (k < 1) throw RedialError(ErrorCode::invalid_argument, "recall cutoff must be >= 1");
  if (instance.ground_truth.empty()) {
    throw RedialError(ErrorCode::invalid_argument,
                      "recall undefined for empty ground truth: " + instance.instance_id);
  }
  std::set<std::int64_t> truth(instance.ground_truth.begin(), instance.ground_truth.end());
  std::size_t depth = std::min<std::size_t>(prediction.ranking.size(), static_cast<std::size_t>(k));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (truth.count(prediction.ranking[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

InstanceScore score_instance(const RankedPrediction& prediction, const EvaluationInstance& instance,
                             const std::vector<int>& cutoffs) {
  if (instance.ground_truth.empty()) {
    throw RedialError(ErrorCode::invalid_argument,
                      "recall undefined for empty ground truth: " + instance.instance_id);
  }
  std::set<std::int64_t> truth(instance.ground_truth.begin(), instance.ground_truth.end());

  InstanceScore score;
  int max_k = cutoffs.empty() ? 0 : *std::max_element(cutoffs.begin(), cutoffs.end());
  std::size_t depth = std::min<std::size_t>(prediction.ranking.size(), static_cast<std::size_t>(max_k));
  std::vector<std::size_t> hits_by_rank(depth + 1, 0);  // prefix hit counts
  for (std::size_t i = 0; i < depth; ++i) {
    bool hit = truth.count(prediction.ranking[i]) > 0;
    hits_by_rank[i + 1] = hits_by_rank[i] + (hit ? 1 : 0);
    if (hit && !score.hit_rank) score.hit_rank = static_cast<int>(i + 1);
  }
  for (int k : cutoffs) {
    std::size_t at = std::min<std::size_t>(depth, static_cast<std::size_t>(k));
    score.recall_at[k] = static_cast<double>(hits_by_rank[at]) / static_cast<double>(truth.size());
  }
  return score;
}

namespace {

struct DialogueTally {
  bool success = false;
  KahanSum reward;
  int denominator_turns = 0;
};

// Reward for the best hit within the SR/RDL cutoff: 1.0 liked, 0.5 merely
// seen, 0 otherwise.
double hit_reward(std::int64_t item, const DialogueMeta* meta, std::size_t* missing_forms) {
  if (!meta) {
    ++*missing_forms;
    return 0.0;
  }
  auto it = meta->seeker_forms.find(item);
  if (it == meta->seeker_forms.end()) {
    ++*missing_forms;
    return 0.0;
  }
  if (it->second.liked == TriState::yes) return 1.0;
  if (it->second.seen == TriState::yes) return 0.5;
  return 0.0;
}

}  // namespace

MetricReport score_all(const InstanceSet& instances, const PredictionSet& predictions,
                       const Config& config, bool compute_rdl) {
  if (instances.instances.empty()) {
    throw RedialError(ErrorCode::empty_input, "no instances to score");
  }
  if (instances.fingerprint != 0 && predictions.source_fingerprint != 0) {
    if (instances.fingerprint != predictions.source_fingerprint ||
        (!predictions.source_variant.empty() &&
         predictions.source_variant != to_string(instances.variant))) {
      throw RedialError(ErrorCode::fingerprint_mismatch,
                        "predictions were produced against a different instance file (" +
                            predictions.source_variant + "/" + to_hex(predictions.source_fingerprint) +
                            ", instances carry " + to_string(instances.variant) + "/" +
                            to_hex(instances.fingerprint) + "); pass --force to override");
    }
  }
  if (compute_rdl && !instances.has_meta) {
    throw RedialError(ErrorCode::invalid_argument,
                      "dialogue metadata is required for RDL; pass the dialogues file written by build");
  }

  std::vector<std::string> missing;
  for (const EvaluationInstance& instance : instances.instances) {
    if (!predictions.find(instance.instance_id)) missing.push_back(instance.instance_id);
  }
  if (!missing.empty()) {
    std::string listed;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
      if (i > 0) listed += ", ";
      listed += missing[i];
    }
    if (missing.size() > 10) listed += ", … +" + std::to_string(missing.size() - 10) + " more";
    throw RedialError(ErrorCode::missing_prediction,
                      "missing predictions for " + std::to_string(missing.size()) +
                          " instance(s): " + listed);
  }

  const bool micro = config.recall_average == "micro";
  std::map<int, KahanSum> recall_sums;           // macro: recall values; micro: hit counts
  KahanSum truth_total;                          // micro denominator
  std::map<std::string, DialogueTally> by_dialogue;

  for (const EvaluationInstance& instance : instances.instances) {
    const RankedPrediction& prediction = *predictions.find(instance.instance_id);
    InstanceScore score = score_instance(prediction, instance, config.k);

    std::set<std::int64_t> truth(instance.ground_truth.begin(), instance.ground_truth.end());
    for (int k : config.k) {
      if (micro) {
        recall_sums[k].add(score.recall_at[k] * static_cast<double>(truth.size()));
      } else {
        recall_sums[k].add(score.recall_at[k]);
      }
    }
    truth_total.add(static_cast<double>(truth.size()));

    DialogueTally& tally = by_dialogue[instance.dialogue_id];
    bool hit_within_cutoff = score.hit_rank && *score.hit_rank <= config.sr_cutoff;
    if (hit_within_cutoff) tally.success = true;
  }

  MetricReport report;
  report.variant = to_string(instances.variant);
  report.instance_count = instances.instances.size();
  report.dialogue_count = by_dialogue.size();
  report.sr_cutoff = config.sr_cutoff;
  report.fingerprint = to_hex(config.fingerprint());
  if (instances.fingerprint != 0) report.instances_fingerprint = to_hex(instances.fingerprint);
  if (predictions.fingerprint != 0) report.predictions_fingerprint = to_hex(predictions.fingerprint);
  for (const std::string& line : split_string(config.dump(), '\n')) {
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    report.config.emplace(line.substr(0, eq), line.substr(eq + 1));
  }

  for (int k : config.k) {
    double denom = micro ? truth_total.value() : static_cast<double>(report.instance_count);
    report.recall[k] = recall_sums[k].value() / denom;
  }

  std::size_t successes = 0;
  for (const auto& [dialogue_id, tally] : by_dialogue) {
    if (tally.success) ++successes;
  }
  report.success_rate = static_cast<double>(successes) / static_cast<double>(report.dialogue_count);

  if (compute_rdl) {
    std::size_t missing_forms = 0;
    std::map<std::string, KahanSum> rewards;
    for (const EvaluationInstance& instance : instances.instances) {
      const RankedPrediction& prediction = *predictions.find(instance.instance_id);
      std::set<std::int64_t> truth(instance.ground_truth.begin(), instance.ground_truth.end());
      const DialogueMeta* meta = instances.find_meta(instance.dialogue_id);
      std::size_t depth = std::min<std::size_t>(prediction.ranking.size(),
                                                static_cast<std::size_t>(config.sr_cutoff));
      double best = 0.0;
      bool any_hit = false;
      for (std::size_t i = 0; i < depth; ++i) {
        if (!truth.count(prediction.ranking[i])) continue;
        any_hit = true;
        best = std::max(best, hit_reward(prediction.ranking[i], meta, &missing_forms));
      }
      if (any_hit) rewards[instance.dialogue_id].add(best);
    }

    KahanSum rdl_sum;
    for (const auto& [dialogue_id, tally] : by_dialogue) {
      const DialogueMeta* meta = instances.find_meta(dialogue_id);
      if (!meta) {
        throw RedialError(ErrorCode::invalid_argument,
                          "no dialogue metadata for dialogue " + dialogue_id);
      }
      int denominator = config.rdl_denominator == "recommender-turns" ? meta->recommender_turns
                                                                      : meta->merged_turns;
      if (denominator < 1) {
        throw RedialError(ErrorCode::invalid_argument,
                          "dialogue " + dialogue_id + " has a non-positive turn count");
      }
      double reward = 0.0;
      if (auto it = rewards.find(dialogue_id); it != rewards.end()) reward = it->second.value();
      rdl_sum.add(reward / static_cast<double>(denominator));
    }
    report.rdl = rdl_sum.value() / static_cast<double>(report.dialogue_count);
    report.has_rdl = true;
    report.missing_form_hits = missing_forms;
  }

  std::set<std::string> instance_ids;
  for (const EvaluationInstance& instance : instances.instances) {
    instance_ids.insert(instance.instance_id);
  }
  std::size_t matched = 0;
  for (const RankedPrediction& prediction : predictions.predictions) {
    if (instance_ids.count(prediction.instance_id)) ++matched;
  }
  report.ignored_predictions = predictions.predictions.size() - matched;
  return report;
}

// --- prediction files --------------------------------------------------------

namespace {

ordered_json config_as_json(const Config& config) {
  ordered_json obj = ordered_json::object();
  for (const std::string& line : split_string(config.dump(), '\n')) {
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    obj[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return obj;
}

}  // namespace

void write_predictions_file(const PredictionSet& set, const std::string& path, const Config& config) {
  std::string out;
  ordered_json header;
  header["artifact"] = "predictions";
  header["format"] = 1;
  header["count"] = set.predictions.size();
  header["fingerprint"] = to_hex(config.fingerprint());
  if (set.source_fingerprint != 0) {
    header["source_fingerprint"] = to_hex(set.source_fingerprint);
    if (!set.source_variant.empty()) header["source_variant"] = set.source_variant;
  }
  header["config"] = config_as_json(config);
  out += header.dump();
  out += '\n';
  for (const RankedPrediction& prediction : set.predictions) {
    ordered_json record;
    record["instance_id"] = prediction.instance_id;
    record["ranking"] = prediction.ranking;
    out += record.dump();
    out += '\n';
  }
  write_text_file(path, out);
}

PredictionSet read_predictions_file(const std::string& path) {
  PredictionSet set;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw RedialError(ErrorCode::parse,
                        path + ":" + std::to_string(line_no) + ": invalid JSON: " + e.what());
    }
    if (first_record && record.is_object() && record.value("artifact", "") == "predictions") {
      if (record.contains("fingerprint")) set.fingerprint = from_hex(record["fingerprint"].get<std::string>());
      if (record.contains("source_fingerprint")) {
        set.source_fingerprint = from_hex(record["source_fingerprint"].get<std::string>());
      }
      set.source_variant = record.value("source_variant", "");
      first_record = false;
      continue;
    }
    first_record = false;
    if (!record.contains("instance_id") || !record["instance_id"].is_string()) {
      throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": missing instance_id");
    }
    if (!record.contains("ranking") || !record["ranking"].is_array()) {
      throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) + ": missing ranking array");
    }
    RankedPrediction prediction;
    prediction.instance_id = record["instance_id"].get<std::string>();
    std::set<std::int64_t> seen;
    for (const json& item : record["ranking"]) {
      if (!item.is_number_integer()) {
        throw RedialError(ErrorCode::parse,
                          path + ":" + std::to_string(line_no) + ": ranking items must be integers");
      }
      std::int64_t id = item.get<std::int64_t>();
      if (id < 0) {
        throw RedialError(ErrorCode::parse, path + ":" + std::to_string(line_no) +
                                                ": ranking contains a negative id (" +
                                                std::to_string(id) + "); predictions must be non-negative");
      }
      if (!seen.insert(id).second) {
        throw RedialError(ErrorCode::duplicate_id,
                          path + ":" + std::to_string(line_no) + ": duplicate item " +
                              std::to_string(id) + " in ranking for " + prediction.instance_id);
      }
      prediction.ranking.push_back(id);
    }
    set.add(std::move(prediction));
  }
  return set;
}

// --- report files -------------------------------------------------------------

namespace {

ordered_json report_to_json_obj(const MetricReport& report) {
  ordered_json doc;
  doc["artifact"] = "report";
  doc["name"] = report.name;
  doc["variant"] = report.variant;
  ordered_json recall = ordered_json::object();
  for (const auto& [k, value] : report.recall) recall[std::to_string(k)] = value;
  doc["recall"] = std::move(recall);
  doc["success_rate"] = report.success_rate;
  if (report.has_rdl) doc["rdl"] = report.rdl;
  doc["instance_count"] = report.instance_count;
  doc["dialogue_count"] = report.dialogue_count;
  doc["sr_cutoff"] = report.sr_cutoff;
  doc["missing_form_hits"] = report.missing_form_hits;
  doc["ignored_predictions"] = report.ignored_predictions;
  doc["fingerprint"] = report.fingerprint;
  if (!report.instances_fingerprint.empty()) doc["instances_fingerprint"] = report.instances_fingerprint;
  if (!report.predictions_fingerprint.empty()) doc["predictions_fingerprint"] = report.predictions_fingerprint;
  ordered_json config = ordered_json::object();
  for (const auto& [key, value] : report.config) config[key] = value;
  doc["config"] = std::move(config);
  return doc;
}

}  // namespace

std::string report_to_json(const MetricReport& report) {
  return report_to_json_obj(report).dump(2) + "\n";
}

void write_report_json(const MetricReport& report, const std::string& path) {
  write_text_file(path, report_to_json(report));
}

MetricReport read_report_json(const std::string& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw RedialError(ErrorCode::parse, path + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("artifact", "") != "report") {
    throw RedialError(ErrorCode::parse, path + ": not a metric report");
  }
  MetricReport report;
  report.name = doc.value("name", "");
  report.variant = doc.value("variant", "");
  if (doc.contains("recall")) {
    for (const auto& [key, value] : doc["recall"].items()) {
      report.recall[std::stoi(key)] = value.get<double>();
    }
  }
  report.success_rate = doc.value("success_rate", 0.0);
  if (doc.contains("rdl")) {
    report.rdl = doc["rdl"].get<double>();
    report.has_rdl = true;
  }
  report.instance_count = doc.value("instance_count", std::size_t{0});
  report.dialogue_count = doc.value("dialogue_count", std::size_t{0});
  report.sr_cutoff = doc.value("sr_cutoff", 1);
  report.missing_form_hits = doc.value("missing_form_hits", std::size_t{0});
  report.ignored_predictions = doc.value("ignored_predictions", std::size_t{0});
  report.fingerprint = doc.value("fingerprint", "");
  report.instances_fingerprint = doc.value("instances_fingerprint", "");
  report.predictions_fingerprint = doc.value("predictions_fingerprint", "");
  if (doc.contains("config")) {
    for (const auto& [key, value] : doc["config"].items()) {
      report.config.emplace(key, value.get<std::string>());
    }
  }
  return report;
}

namespace {

std::string format_metric(double value) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << value;
  return out.str();
}

std::vector<int> all_cutoffs(const std::vector<MetricReport>& reports) {
  std::set<int> cutoffs;
  for (const MetricReport& report : reports) {
    for (const auto& [k, value] : report.recall) cutoffs.insert(k);
  }
  return {cutoffs.begin(), cutoffs.end()};
}

}  // namespace

std::string report_csv_header(const std::vector<int>& cutoffs) {
  std::string header = "name,variant,instances,dialogues";
  for (int k : cutoffs) header += ",R@" + std::to_string(k);
  header += ",SR,RDL,sr_cutoff,missing_form_hits,fingerprint";
  return header;
}

std::string report_csv_row(const MetricReport& report, const std::vector<int>& cutoffs) {
  std::string row = report.name + "," + report.variant + "," + std::to_string(report.instance_count) +
                    "," + std::to_string(report.dialogue_count);
  for (int k : cutoffs) {
    row += ",";
    if (auto it = report.recall.find(k); it != report.recall.end()) row += format_metric(it->second);
  }
  row += "," + format_metric(report.success_rate);
  row += ",";
  if (report.has_rdl) row += format_metric(report.rdl);
  row += "," + std::to_string(report.sr_cutoff);
  row += "," + std::to_string(report.missing_form_hits);
  row += "," + report.fingerprint;
  return row;
}

void write_report_csv(const MetricReport& report, const std::string& path) {
  std::vector<int> cutoffs;
  for (const auto& [k, value] : report.recall) cutoffs.push_back(k);
  write_text_file(path, report_csv_header(cutoffs) + "\n" + report_csv_row(report, cutoffs) + "\n");
}

std::string merge_reports_csv(const std::vector<MetricReport>& reports) {
  std::vector<int> cutoffs = all_cutoffs(reports);
  std::string out = report_csv_header(cutoffs) + "\n";
  for (const MetricReport& report : reports) out += report_csv_row(report, cutoffs) + "\n";
  return out;
}

std::string merge_reports_text(const std::vector<MetricReport>& reports) {
  std::vector<int> cutoffs = all_cutoffs(reports);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header = {"name", "variant", "inst", "dlg"};
  for (int k : cutoffs) header.push_back("R@" + std::to_string(k));
  header.push_back("SR");
  header.push_back("RDL");
  rows.push_back(header);
  for (const MetricReport& report : reports) {
    std::vector<std::string> row = {report.name, report.variant, std::to_string(report.instance_count),
                                    std::to_string(report.dialogue_count)};
    for (int k : cutoffs) {
      auto it = report.recall.find(k);
      row.push_back(it == report.recall.end() ? "-" : format_metric(it->second));
    }
    row.push_back(format_metric(report.success_rate));
    row.push_back(report.has_rdl ? format_metric(report.rdl) : "-");
    rows.push_back(std::move(row));
  }

  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  }
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += "  ";
      out += row[i];
      out.append(widths[i] - row[i].size(), ' ');
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
  }
  return out;
}

}  // namespace redial
