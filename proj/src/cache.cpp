#include "pcc/cache.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "pcc/errors.hpp"

namespace fs = std::filesystem;

namespace pcc {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

CacheKey CacheKey::make(const std::string& backend_id, const std::string& model_id,
                        const nlohmann::json& request) {
  // nlohmann objects keep sorted keys; dump() with no indent is canonical.
  nlohmann::json envelope{{"backend", backend_id}, {"model", model_id}, {"request", request}};
  return CacheKey{sha256_hex(envelope.dump())};
}

ResponseCache::ResponseCache(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::string ResponseCache::path_for(const CacheKey& key) const {
  return dir_ + "/" + key.digest + ".json";
}

std::optional<nlohmann::json> ResponseCache::lookup(const CacheKey& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  nlohmann::json entry = nlohmann::json::parse(in, nullptr, false);
  if (entry.is_discarded() || !entry.contains("response")) return std::nullopt;
  return entry["response"];
}

void ResponseCache::store(const CacheKey& key, const std::string& backend_id,
                          const std::string& model_id, const nlohmann::json& request,
                          const nlohmann::json& response) const {
  const std::string final_path = path_for(key);
  if (fs::exists(final_path)) return;  // entries are immutable
  const auto now = std::chrono::duration_cast<std::chrono::seconds>(
                       std::chrono::system_clock::now().time_since_epoch())
                       .count();
  nlohmann::json entry{{"key", key.digest},
                       {"backend", backend_id},
                       {"model", model_id},
                       {"request", request},
                       {"response", response},
                       {"timestamp", now}};
  std::ostringstream tmp_name;
  tmp_name << final_path << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id());
  {
    std::ofstream out(tmp_name.str(), std::ios::binary | std::ios::trunc);
    if (!out) throw FileUnreadable("cannot write cache file: " + tmp_name.str());
    out << entry.dump(2) << "\n";
  }
  std::error_code ec;
  fs::rename(tmp_name.str(), final_path, ec);
  if (ec) {
    // A concurrent writer may have published the same key first.
    fs::remove(tmp_name.str(), ec);
    if (!fs::exists(final_path)) throw FileUnreadable("cache publish failed: " + final_path);
  }
}

}  // namespace pcc
