#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slra {

/// Outcome of one acceptance criterion: a headline metric, the bound it was
/// held to, and the entry-access tally where the criterion tracks one.
struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double metric = 0;
  double threshold = 0;
  unsigned long long entry_accesses = 0;
  std::string detail;    // semicolon-separated extras, CSV-safe
  double seconds = 0;    // wall clock; reported but never serialized
};

/// Runs the twelve acceptance criteria. Quick mode shrinks trial counts but
/// keeps every check live. Deterministic per seed (timings excluded).
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, bool quick);

/// One row per criterion, one header line; statistics at 6 significant
/// digits, seed at full precision; excludes wall-clock timing so identical
/// (seed, build) runs are byte-identical.
std::string acceptance_csv(const std::vector<CriterionResult>& results,
                           std::uint64_t seed);

/// 6-significant-digit formatting shared by every CSV emitter.
std::string format_stat(double v);

}  // namespace slra
