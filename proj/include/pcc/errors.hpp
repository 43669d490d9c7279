#pragma once

#include <stdexcept>
#include <string>

namespace pcc {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// signals
struct DegenerateDistribution : Error {
  explicit DegenerateDistribution(const std::string& msg) : Error(msg) {}
};

// prompts
struct MissingPlaceholder : Error {
  explicit MissingPlaceholder(const std::string& msg) : Error(msg) {}
};

// backends
struct BackendUnavailable : Error {
  explicit BackendUnavailable(const std::string& msg) : Error(msg) {}
};
struct LogprobsUnsupported : Error {
  explicit LogprobsUnsupported(const std::string& msg) : Error(msg) {}
};
struct QuotaExceeded : Error {
  explicit QuotaExceeded(const std::string& msg) : Error(msg) {}
};
struct ReplayMiss : Error {
  explicit ReplayMiss(const std::string& msg) : Error(msg) {}
};

// strategies
struct QueryParseError : Error {
  explicit QueryParseError(const std::string& msg) : Error(msg) {}
};

// eval
struct EmptyInput : Error {
  explicit EmptyInput(const std::string& msg) : Error(msg) {}
};
struct DegenerateLabels : Error {
  explicit DegenerateLabels(const std::string& msg) : Error(msg) {}
};
struct MissingColumn : Error {
  explicit MissingColumn(const std::string& msg) : Error(msg) {}
};

// datasets
struct FileUnreadable : Error {
  explicit FileUnreadable(const std::string& msg) : Error(msg) {}
};
struct SchemaMismatch : Error {
  explicit SchemaMismatch(const std::string& msg) : Error(msg) {}
};
struct SampleTooLarge : Error {
  explicit SampleTooLarge(const std::string& msg) : Error(msg) {}
};

// cli / config
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace pcc
