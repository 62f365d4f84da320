#pragma once

#include <stdexcept>
#include <string>

namespace slra {

// Typed failures: algorithms report rank/selection breakdowns so callers can
// retry with fresh multipliers or larger target ranks.

struct RangeFailure : std::runtime_error {
  explicit RangeFailure(const std::string& m) : std::runtime_error(m) {}
};

struct SketchRankFailure : std::runtime_error {
  explicit SketchRankFailure(const std::string& m) : std::runtime_error(m) {}
};

struct PremultRankFailure : std::runtime_error {
  explicit PremultRankFailure(const std::string& m) : std::runtime_error(m) {}
};

struct SelectionFailure : std::runtime_error {
  explicit SelectionFailure(const std::string& m) : std::runtime_error(m) {}
};

struct GeneratorRankFailure : std::runtime_error {
  explicit GeneratorRankFailure(const std::string& m) : std::runtime_error(m) {}
};

struct EmptySample : std::runtime_error {
  explicit EmptySample(const std::string& m) : std::runtime_error(m) {}
};

}  // namespace slra
