#include "pcc/datasets.hpp"

#include <algorithm>
#include <fstream>

#include "pcc/errors.hpp"
#include "pcc/signals.hpp"

namespace pcc {

nlohmann::json Claim::to_json() const {
  nlohmann::json j{{"id", id}, {"claim", text}, {"source", source}};
  if (gold) j["label"] = *gold ? "True" : "False";
  if (hops) j["hops"] = *hops;
  return j;
}

Claim Claim::from_json(const nlohmann::json& j) {
  Claim c;
  c.id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
  c.text = j.at("claim").get<std::string>();
  c.source = j.value("source", "");
  if (j.contains("label") && !j["label"].is_null()) {
    c.gold = normalize_label(j["label"].is_string() ? j["label"].get<std::string>()
                                                    : j["label"].dump());
  }
  if (j.contains("hops") && j["hops"].is_number()) c.hops = j["hops"].get<int>();
  return c;
}

std::optional<bool> normalize_label(const std::string& raw) {
  const std::string norm = normalize_token(raw);
  static const std::vector<std::string> truthy = {
      "true", "supported", "support", "supports", "factual", "correct", "1"};
  static const std::vector<std::string> falsy = {
      "false",   "refuted",     "refute",    "refutes", "not_supported", "not supported",
      "nonfactual", "non-factual", "incorrect", "0"};
  if (std::find(truthy.begin(), truthy.end(), norm) != truthy.end()) return true;
  if (std::find(falsy.begin(), falsy.end(), norm) != falsy.end()) return false;
  return std::nullopt;
}

LoadResult load_claims(const DatasetManifest& manifest) {
  std::ifstream in(manifest.path, std::ios::binary);
  if (!in) throw FileUnreadable("cannot open dataset: " + manifest.path);

  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  std::size_t considered = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ++considered;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      result.errors.push_back({line_no, "invalid JSON"});
      continue;
    }
    if (!j.contains(manifest.claim_field) || !j[manifest.claim_field].is_string() ||
        j[manifest.claim_field].get<std::string>().empty()) {
      result.errors.push_back({line_no, "missing claim field '" + manifest.claim_field + "'"});
      continue;
    }
    Claim c;
    if (j.contains(manifest.id_field)) {
      c.id = j[manifest.id_field].is_string() ? j[manifest.id_field].get<std::string>()
                                              : j[manifest.id_field].dump();
    } else {
      c.id = manifest.name + ":" + std::to_string(line_no);
    }
    c.text = j[manifest.claim_field].get<std::string>();
    c.source = manifest.name;
    if (j.contains(manifest.label_field) && !j[manifest.label_field].is_null()) {
      const std::string raw = j[manifest.label_field].is_string()
                                  ? j[manifest.label_field].get<std::string>()
                                  : j[manifest.label_field].dump();
      auto gold = normalize_label(raw);
      if (!gold) {
        result.errors.push_back({line_no, "unrecognized label '" + raw + "'"});
        continue;
      }
      c.gold = gold;
    }
    if (j.contains("hops") && j["hops"].is_number()) c.hops = j["hops"].get<int>();
    result.claims.push_back(std::move(c));
  }
  if (considered > 0 && result.errors.size() * 2 > considered) {
    throw SchemaMismatch("more than half of the lines in " + manifest.path + " are invalid (" +
                         std::to_string(result.errors.size()) + "/" +
                         std::to_string(considered) + ")");
  }
  return result;
}

std::vector<Claim> binarize_scifact(const std::vector<EvidenceRecord>& records) {
  std::vector<Claim> out;
  for (const auto& rec : records) {
    bool any_support = false;
    bool any_refute = false;
    for (const auto& raw : rec.evidence_labels) {
      const std::string norm = normalize_token(raw);
      if (norm == "support" || norm == "supports" || norm == "supported") any_support = true;
      else if (norm == "refute" || norm == "refutes" || norm == "refuted" ||
               norm == "contradict" || norm == "contradicts") any_refute = true;
      // NotEnoughInfo variants carry no vote
    }
    if (any_support == any_refute) continue;  // conflicting, or NEI/empty only
    Claim c;
    c.id = rec.id;
    c.text = rec.claim;
    c.gold = any_support;
    c.source = "scifact";
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

// splitmix64: simple, well-known, bit-identical everywhere.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<Claim> sample_subset(std::vector<Claim> claims, std::size_t n, std::uint64_t seed) {
  if (n > claims.size()) {
    throw SampleTooLarge("requested " + std::to_string(n) + " of " +
                         std::to_string(claims.size()) + " claims");
  }
  std::sort(claims.begin(), claims.end(),
            [](const Claim& a, const Claim& b) { return a.id < b.id; });
  std::uint64_t state = seed;
  // partial Fisher-Yates: first n slots become the sample
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + splitmix64(state) % (claims.size() - i);
    std::swap(claims[i], claims[j]);
  }
  claims.resize(n);
  std::sort(claims.begin(), claims.end(),
            [](const Claim& a, const Claim& b) { return a.id < b.id; });
  return claims;
}

void write_claims_jsonl(const std::vector<Claim>& claims, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileUnreadable("cannot write: " + path);
  for (const auto& c : claims) out << c.to_json().dump() << "\n";
}

}  // namespace pcc
