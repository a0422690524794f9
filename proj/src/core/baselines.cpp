#include "core/baselines.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace redial {

std::vector<std::int64_t> naive_recommend(const EvaluationInstance& instance,
                                          const std::string& naive_scope) {
  const bool seeker_only = naive_scope == "seeker-only";

  std::vector<std::int64_t> in_order;  // every mention occurrence, context order
  for (const Turn& turn : instance.context) {
    if (seeker_only && turn.role != Role::seeker) continue;
    in_order.insert(in_order.end(), turn.mentions.begin(), turn.mentions.end());
  }

  // Reverse scan keeps each item at its most recent position.
  std::vector<std::int64_t> ranking;
  std::set<std::int64_t> emitted;
  for (auto it = in_order.rbegin(); it != in_order.rend(); ++it) {
    if (emitted.insert(*it).second) ranking.push_back(*it);
  }
  return ranking;
}

PopularityModel PopularityModel::fit(const InstanceSet& train_standard) {
  std::map<std::int64_t, std::size_t> frequency;
  for (const EvaluationInstance& instance : train_standard.instances) {
    for (std::int64_t item : instance.ground_truth) {
      if (item >= 0) ++frequency[item];
    }
  }
  PopularityModel model;
  model.order.reserve(frequency.size());
  for (const auto& [item, count] : frequency) model.order.push_back(item);
  std::stable_sort(model.order.begin(), model.order.end(),
                   [&frequency](std::int64_t a, std::int64_t b) {
                     std::size_t fa = frequency[a], fb = frequency[b];
                     if (fa != fb) return fa > fb;
                     return a < b;
                   });
  return model;
}

std::vector<std::int64_t> popularity_recommend(const PopularityModel& model, std::size_t k) {
  if (k == 0) throw RedialError(ErrorCode::invalid_argument, "popularity cutoff k must be >= 1");
  std::vector<std::int64_t> out;
  out.reserve(std::min(k, model.order.size()));
  for (std::size_t i = 0; i < model.order.size() && i < k; ++i) out.push_back(model.order[i]);
  return out;
}

PredictionSet run_baseline(const std::string& name, const InstanceSet& instances,
                           const PopularityModel* model, const Config& config) {
  PredictionSet set;
  if (name == "naive") {
    for (const EvaluationInstance& instance : instances.instances) {
      set.add(RankedPrediction{instance.instance_id, naive_recommend(instance, config.naive_scope)});
    }
  } else if (name == "popularity") {
    if (!model) throw RedialError(ErrorCode::invalid_argument, "popularity baseline needs a fitted model");
    std::size_t depth = config.k.empty() ? 50 : static_cast<std::size_t>(config.k.back());
    std::vector<std::int64_t> top = popularity_recommend(*model, depth);
    for (const EvaluationInstance& instance : instances.instances) {
      set.add(RankedPrediction{instance.instance_id, top});
    }
  } else {
    throw RedialError(ErrorCode::invalid_argument, "unknown baseline: " + name);
  }
  return set;
}

}  // namespace redial
