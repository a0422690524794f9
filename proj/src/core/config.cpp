#include "core/config.hpp"

#include <algorithm>
#include <charconv>

#include <nlohmann/json.hpp>

namespace redial {

namespace {

int parse_int(const std::string& value, const std::string& key) {
  int out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw RedialError(ErrorCode::invalid_argument, "option " + key + " expects an integer, got: " + value);
  }
  return out;
}

void expect_one_of(const std::string& key, const std::string& value,
                   std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (value == a) return;
  }
  std::string msg = "option " + key + " must be one of {";
  bool first = true;
  for (const char* a : allowed) {
    if (!first) msg += ",";
    msg += a;
    first = false;
  }
  msg += "}, got: " + value;
  throw RedialError(ErrorCode::invalid_argument, msg);
}

}  // namespace

std::vector<int> parse_k_list(const std::string& value) {
  std::vector<int> ks;
  for (const std::string& part : split_string(value, ',')) {
    if (part.empty()) continue;
    int k = parse_int(part, "k");
    if (k < 1) throw RedialError(ErrorCode::invalid_argument, "recall cutoff must be >= 1, got: " + part);
    ks.push_back(k);
  }
  if (ks.empty()) throw RedialError(ErrorCode::invalid_argument, "option k needs at least one cutoff");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void Config::set(const std::string& key, const std::string& value) {
  if (key == "split") {
    expect_one_of(key, value, {"train", "test"});
    split = value;
  } else if (key == "variant") {
    expect_one_of(key, value, {"standard", "dedup", "both"});
    variant = value;
  } else if (key == "catalog") {
    catalog = value;
  } else if (key == "k") {
    k = parse_k_list(value);
  } else if (key == "sr-cutoff") {
    int c = parse_int(value, key);
    if (c < 1 || c > 50) throw RedialError(ErrorCode::invalid_argument, "sr-cutoff must be in [1,50]");
    sr_cutoff = c;
  } else if (key == "rdl-denominator") {
    expect_one_of(key, value, {"all-turns", "recommender-turns"});
    rdl_denominator = value;
  } else if (key == "gt-mode") {
    expect_one_of(key, value, {"mentioned", "suggested-only"});
    gt_mode = value;
  } else if (key == "recall-average") {
    expect_one_of(key, value, {"macro", "micro"});
    recall_average = value;
  } else if (key == "naive-scope") {
    expect_one_of(key, value, {"both-speakers", "seeker-only"});
    naive_scope = value;
  } else if (key == "strict-validation") {
    expect_one_of(key, value, {"true", "false", "1", "0"});
    strict_validation = (value == "true" || value == "1");
  } else {
    throw RedialError(ErrorCode::invalid_argument, "unknown option: " + key);
  }
}

void Config::load_file(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw RedialError(ErrorCode::parse, "config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw RedialError(ErrorCode::parse, "config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_string()) set(key, value.get<std::string>());
    else if (value.is_boolean()) set(key, value.get<bool>() ? "true" : "false");
    else if (value.is_number_integer()) set(key, std::to_string(value.get<long long>()));
    else throw RedialError(ErrorCode::parse, "config option " + key + " has unsupported type");
  }
}

std::string Config::k_as_string() const {
  std::vector<std::string> parts;
  parts.reserve(k.size());
  for (int cutoff : k) parts.push_back(std::to_string(cutoff));
  return join(parts, ",");
}

std::string Config::dump() const {
  std::map<std::string, std::string> kv = {
      {"catalog", catalog},
      {"gt-mode", gt_mode},
      {"k", k_as_string()},
      {"naive-scope", naive_scope},
      {"rdl-denominator", rdl_denominator},
      {"recall-average", recall_average},
      {"split", split},
      {"sr-cutoff", std::to_string(sr_cutoff)},
      {"strict-validation", strict_validation ? "true" : "false"},
      {"variant", variant},
  };
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace redial
