#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redial {

enum class Split { train, test };

enum class Variant { standard, dedup };

// Error classes shared by the C++ core, the C API status codes, and the
// CLI exit codes. Keep the numbering stable; it is part of the interface.
enum class ErrorCode : int {
  ok = 0,
  io = 1,
  parse = 2,
  invalid_argument = 3,
  duplicate_id = 4,
  missing_prediction = 5,
  fingerprint_mismatch = 6,
  empty_input = 7,
  internal = 8,
};

class RedialError : public std::runtime_error {
 public:
  RedialError(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string to_string(Split s) { return s == Split::train ? "train" : "test"; }
inline std::string to_string(Variant v) { return v == Variant::standard ? "standard" : "dedup"; }

inline Split split_from_string(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "test") return Split::test;
  throw RedialError(ErrorCode::invalid_argument, "unknown split: " + std::string(s));
}

inline Variant variant_from_string(std::string_view s) {
  if (s == "standard") return Variant::standard;
  if (s == "dedup") return Variant::dedup;
  throw RedialError(ErrorCode::invalid_argument, "unknown variant: " + std::string(s));
}

// FNV-1a, used for config fingerprints. Stable across platforms.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t value);
std::uint64_t from_hex(std::string_view hex);

// Compensated (Kahan) accumulator so that aggregation order cannot move
// reported values at printed precision.
class KahanSum {
 public:
  void add(double value) {
    double y = value - compensation_;
    double t = sum_ + y;
    compensation_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

std::vector<std::string> split_string(std::string_view text, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Parallelism cap: REDIAL_BENCH_THREADS, defaulting to a small multiple of
// the hardware. Never affects output content, only wall time.
int effective_threads();

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

}  // namespace redial
