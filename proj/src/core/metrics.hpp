#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/instances.hpp"

namespace redial {

struct RankedPrediction {
  std::string instance_id;
  std::vector<std::int64_t> ranking;  // duplicate-free, non-negative ids
};

struct PredictionSet {
  std::vector<RankedPrediction> predictions;
  std::map<std::string, std::size_t> index;          // instance_id -> position
  std::uint64_t fingerprint = 0;                     // of the producing invocation
  std::uint64_t source_fingerprint = 0;              // of the instance file scored against
  std::string source_variant;                        // variant of that instance file

  const RankedPrediction* find(const std::string& instance_id) const;
  void add(RankedPrediction prediction);             // throws on duplicate instance_id
};

// |top-k(pred) ∩ ground_truth| / |ground_truth|. Rankings shorter than k are
// used as-is; negative ground-truth ids can never match.
double recall_at_k(const RankedPrediction& prediction, const EvaluationInstance& instance, int k);

struct InstanceScore {
  std::map<int, double> recall_at;
  std::optional<int> hit_rank;  // smallest 1-based rank of any ground-truth item
};

InstanceScore score_instance(const RankedPrediction& prediction, const EvaluationInstance& instance,
                             const std::vector<int>& cutoffs);

struct MetricReport {
  std::string variant;
  std::map<int, double> recall;        // cutoff -> mean recall
  double success_rate = 0.0;
  double rdl = 0.0;
  bool has_rdl = false;
  std::size_t instance_count = 0;
  std::size_t dialogue_count = 0;
  int sr_cutoff = 1;
  std::size_t missing_form_hits = 0;   // hits whose seeker form was absent
  std::size_t ignored_predictions = 0; // prediction records with no matching instance
  std::string fingerprint;             // of the scoring invocation
  std::string instances_fingerprint;
  std::string predictions_fingerprint;
  std::map<std::string, std::string> config;  // effective option dump
  std::string name;                    // label used by the comparison table
};

// Scores every instance; every instance must have a prediction. RDL needs
// dialogue metadata on the instance set and is skipped (has_rdl = false)
// only when compute_rdl is off.
MetricReport score_all(const InstanceSet& instances, const PredictionSet& predictions,
                       const Config& config, bool compute_rdl = true);

// --- prediction & report files ---------------------------------------------

void write_predictions_file(const PredictionSet& set, const std::string& path, const Config& config);
PredictionSet read_predictions_file(const std::string& path);

void write_report_json(const MetricReport& report, const std::string& path);
std::string report_to_json(const MetricReport& report);
MetricReport read_report_json(const std::string& path);

std::string report_csv_header(const std::vector<int>& cutoffs);
std::string report_csv_row(const MetricReport& report, const std::vector<int>& cutoffs);
void write_report_csv(const MetricReport& report, const std::string& path);

// Comparison table across several reports (the `report` subcommand).
std::string merge_reports_csv(const std::vector<MetricReport>& reports);
std::string merge_reports_text(const std::vector<MetricReport>& reports);

}  // namespace redial
