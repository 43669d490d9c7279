#include "pcc/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "pcc/errors.hpp"

namespace pcc {

namespace {

const TemplateId kAllIds[] = {
    TemplateId::VerbalConfidence, TemplateId::VerdictToken,  TemplateId::RationaleTrue,
    TemplateId::RationaleFalse,   TemplateId::TargetedQuery, TemplateId::ReflectionQuery,
    TemplateId::DeepVerdict,
};

bool is_placeholder_char(char c) {
  return (c >= 'a' && c <= 'z') || c == '_';
}

}  // namespace

const char* template_name(TemplateId id) {
  switch (id) {
    case TemplateId::VerbalConfidence: return "verbal_confidence";
    case TemplateId::VerdictToken: return "verdict_token";
    case TemplateId::RationaleTrue: return "rationale_true";
    case TemplateId::RationaleFalse: return "rationale_false";
    case TemplateId::TargetedQuery: return "targeted_query";
    case TemplateId::ReflectionQuery: return "reflection_query";
    case TemplateId::DeepVerdict: return "deep_verdict";
  }
  return "unknown";
}

std::set<std::string> scan_placeholders(const std::string& body) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < body.size() && is_placeholder_char(body[j])) ++j;
    if (j > i + 1 && j < body.size() && body[j] == '}') {
      out.insert(body.substr(i + 1, j - i - 1));
      i = j;
    }
  }
  return out;
}

PromptLibrary PromptLibrary::load(const std::string& dir) {
  PromptLibrary lib;
  for (TemplateId id : kAllIds) {
    const std::string path = dir + "/" + template_name(id) + ".txt";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileUnreadable("cannot open prompt template: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string body = buf.str();
    if (!body.empty() && body.back() == '\n') body.pop_back();
    PromptTemplate t{id, std::move(body), {}};
    t.placeholders = scan_placeholders(t.body);
    lib.templates_.emplace(id, std::move(t));
  }
  return lib;
}

const PromptTemplate& PromptLibrary::get(TemplateId id) const {
  return templates_.at(id);
}

std::string PromptLibrary::render(TemplateId id,
                                  const std::map<std::string, std::string>& substitutions) const {
  const PromptTemplate& t = get(id);
  std::vector<std::string> missing;
  for (const std::string& name : t.placeholders) {
    if (!substitutions.count(name)) missing.push_back(name);
  }
  if (!missing.empty()) {
    std::string msg = "unresolved placeholders in " + std::string(template_name(id)) + ":";
    for (const auto& m : missing) msg += " {" + m + "}";
    throw MissingPlaceholder(msg);
  }
  std::string out;
  out.reserve(t.body.size());
  for (std::size_t i = 0; i < t.body.size(); ++i) {
    if (t.body[i] == '{') {
      std::size_t j = i + 1;
      while (j < t.body.size() && is_placeholder_char(t.body[j])) ++j;
      if (j > i + 1 && j < t.body.size() && t.body[j] == '}') {
        const std::string name = t.body.substr(i + 1, j - i - 1);
        auto it = substitutions.find(name);
        if (it != substitutions.end()) {
          out += it->second;
          i = j;
          continue;
        }
      }
    }
    out += t.body[i];
  }
  return out;
}

}  // namespace pcc
