#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/instances.hpp"
#include "core/metrics.hpp"

namespace redial {

// Context items in reverse order of mention: the most recently mentioned
// distinct item ranks first. No padding; the list may be shorter than any
// cutoff. Scope controls whether seeker-only mentions count.
std::vector<std::int64_t> naive_recommend(const EvaluationInstance& instance,
                                          const std::string& naive_scope);

// Items ordered by training-split ground-truth frequency, descending, ties
// broken by ascending id.
struct PopularityModel {
  std::vector<std::int64_t> order;

  static PopularityModel fit(const InstanceSet& train_standard);
};

std::vector<std::int64_t> popularity_recommend(const PopularityModel& model, std::size_t k);

// Runs a named baseline over every instance; "popularity" needs a fitted
// model, "naive" ignores it.
PredictionSet run_baseline(const std::string& name, const InstanceSet& instances,
                           const PopularityModel* model, const Config& config);

}  // namespace redial
