#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace pcc {

struct Claim {
  std::string id;
  std::string text;
  std::optional<bool> gold;  // True/False factuality label
  std::string source;
  std::optional<int> hops;

  nlohmann::json to_json() const;
  static Claim from_json(const nlohmann::json& j);
};

struct DatasetManifest {
  std::string name;
  std::string path;
  std::string label_field = "label";
  std::string claim_field = "claim";
  std::string id_field = "id";
};

struct LoadError {
  std::size_t line = 0;
  std::string message;
};

struct LoadResult {
  std::vector<Claim> claims;
  std::vector<LoadError> errors;
};

// One Claim per valid JSON line; labels normalized to True/False via the
// builtin mapping. Malformed lines land in the error report. Throws
// SchemaMismatch when more than half of non-empty lines are invalid.
LoadResult load_claims(const DatasetManifest& manifest);

// Normalizes a raw label string to a binary gold value; nullopt if unknown.
std::optional<bool> normalize_label(const std::string& raw);

// Evidence-level record for the SciFact-style binarization rules.
struct EvidenceRecord {
  std::string id;
  std::string claim;
  std::vector<std::string> evidence_labels;  // Support / Refute / NotEnoughInfo
};

// All-Support -> True, all-Refute -> False, conflicting or NEI-only -> dropped.
std::vector<Claim> binarize_scifact(const std::vector<EvidenceRecord>& records);

// Deterministic, platform-stable subset of size n. Claims are ordered by id,
// indices chosen by a seeded splitmix64 Fisher-Yates, result re-ordered by id.
std::vector<Claim> sample_subset(std::vector<Claim> claims, std::size_t n, std::uint64_t seed);

void write_claims_jsonl(const std::vector<Claim>& claims, const std::string& path);

}  // namespace pcc
