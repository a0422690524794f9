#pragma once

#include <map>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace redial {

// The full option space of the harness. Every toggle that can change an
// artifact lives here and feeds the config fingerprint; precedence is
// CLI flag > config file > built-in default.
struct Config {
  std::string split = "test";                    // train | test
  std::string variant = "standard";              // standard | dedup | both
  std::string catalog;                           // path, "identity", or empty (no masking)
  std::vector<int> k = {1, 10, 50};              // recall cutoffs
  int sr_cutoff = 1;                             // success-rate cutoff c
  std::string rdl_denominator = "all-turns";     // all-turns | recommender-turns
  std::string gt_mode = "mentioned";             // mentioned | suggested-only
  std::string recall_average = "macro";          // macro | micro
  std::string naive_scope = "both-speakers";     // both-speakers | seeker-only
  bool strict_validation = false;

  // Set one option by its flag name (e.g. "gt-mode", "k"). Validates the value.
  void set(const std::string& key, const std::string& value);

  // Overlay options from a JSON config file ({"gt-mode": "mentioned", ...}).
  void load_file(const std::string& path);

  // Canonical "key=value" dump, one option per line, sorted by key.
  std::string dump() const;

  std::uint64_t fingerprint() const { return fnv1a64(dump()); }

  std::string k_as_string() const;
};

std::vector<int> parse_k_list(const std::string& value);

}  // namespace redial
