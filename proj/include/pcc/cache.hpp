#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace pcc {

std::string sha256_hex(const std::string& data);

// Content-addressed key over (backend_id, model_id, canonical request JSON).
struct CacheKey {
  std::string digest;  // 64 hex chars

  static CacheKey make(const std::string& backend_id, const std::string& model_id,
                       const nlohmann::json& request);
};

// One JSON file per key under a directory. Entries are immutable once
// written; publication is atomic (write to temp file, then rename).
class ResponseCache {
 public:
  explicit ResponseCache(std::string dir);

  std::optional<nlohmann::json> lookup(const CacheKey& key) const;

  // Stores request echo + response + metadata. Returns the stored response.
  void store(const CacheKey& key, const std::string& backend_id, const std::string& model_id,
             const nlohmann::json& request, const nlohmann::json& response) const;

  const std::string& dir() const { return dir_; }

 private:
  std::string path_for(const CacheKey& key) const;

  std::string dir_;
};

}  // namespace pcc
