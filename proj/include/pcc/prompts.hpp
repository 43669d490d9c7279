#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

namespace pcc {

enum class TemplateId {
  VerbalConfidence,
  VerdictToken,
  RationaleTrue,
  RationaleFalse,
  TargetedQuery,
  ReflectionQuery,
  DeepVerdict,
};

const char* template_name(TemplateId id);

struct PromptTemplate {
  TemplateId id;
  std::string body;
  std::set<std::string> placeholders;  // scanned from body
};

// Immutable set of the seven prompt templates, loaded from plain-text
// files named <id>.txt with {placeholder} substitution syntax.
class PromptLibrary {
 public:
  static PromptLibrary load(const std::string& dir);

  const PromptTemplate& get(TemplateId id) const;

  std::string render(TemplateId id,
                     const std::map<std::string, std::string>& substitutions) const;

 private:
  std::map<TemplateId, PromptTemplate> templates_;
};

// All {identifier} occurrences in a template body.
std::set<std::string> scan_placeholders(const std::string& body);

}  // namespace pcc
