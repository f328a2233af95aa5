// Copyright 2026 The matchbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "matchbench/explainer.hpp"

#include <cstdlib>
#include <numeric>

#include <httplib.h>

#include "matchbench/csv.hpp"
#include "matchbench/error.hpp"
#include "matchbench/text.hpp"

namespace matchbench {

std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::kNameSimilarity: return "name_similarity";
    case Criterion::kTokenPatterns: return "token_patterns";
    case Criterion::kSemanticMeaning: return "semantic_meaning";
    case Criterion::kValueCompatibility: return "value_compatibility";
    case Criterion::kDistributionPatterns: return "distribution_patterns";
    case Criterion::kHistoricalMappings: return "historical_mappings";
    case Criterion::kDomainKnowledge: return "domain_knowledge";
  }
  return "unknown";
}

std::string_view to_string(Diagnosis d) {
  switch (d) {
    case Diagnosis::kLikelyMatch: return "likely_match";
    case Diagnosis::kLikelyMismatch: return "likely_mismatch";
    case Diagnosis::kUndetermined: return "undetermined";
  }
  return "undetermined";
}

const CriterionResult& Explanation::criterion(Criterion c) const {
  for (const auto& r : criteria) {
    if (r.name == c) return r;
  }
  throw Error(ErrorCode::kNotFound, "criterion missing");
}

// --- synonyms --------------------------------------------------------------

SynonymTable SynonymTable::from_csv(std::string_view csv) {
  SynonymTable t;
  for (const auto& row : parse_csv(csv)) t.add_row(row);
  return t;
}

std::string SynonymTable::root(const std::string& name) const {
  std::string cur = name;
  while (true) {
    auto it = parent_.find(cur);
    if (it == parent_.end() || it->second == cur) return cur;
    cur = it->second;
  }
}

void SynonymTable::add_row(std::span<const std::string> names) {
  std::optional<std::string> first;
  for (const auto& raw : names) {
    const auto canon = canonicalize_name(raw).canonical;
    if (canon.empty()) continue;
    if (!parent_.count(canon)) parent_[canon] = canon;
    if (!first) {
      first = root(canon);
      continue;
    }
    const auto r = root(canon);
    if (r != *first) {
      // Smaller root wins so the structure is independent of row order.
      const auto& keep = std::min(r, *first);
      const auto& drop = std::max(r, *first);
      parent_[drop] = keep;
      first = keep;
    }
  }
}

bool SynonymTable::equivalent(std::string_view a, std::string_view b) const {
  const auto ca = canonicalize_name(a).canonical;
  const auto cb = canonicalize_name(b).canonical;
  if (!parent_.count(ca) || !parent_.count(cb)) return false;
  return root(ca) == root(cb);
}

// --- criteria --------------------------------------------------------------

namespace {

std::string fmt(double v) { return format_number(std::round(v * 1000.0) / 1000.0); }

std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ", ";
    out += x;
  }
  return out;
}

std::vector<std::string> shared_tokens(std::vector<std::string> a, std::vector<std::string> b) {
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  std::vector<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

Explanation explain_candidate(const MatchContext& ctx, const Pair& pair,
                              const std::set<Pair>* history,
                              const SynonymTable* synonyms) {
  const auto& s = ctx.source(pair.source);
  const auto& t = ctx.target(pair.target);
  Explanation e;
  e.source = pair.source;
  e.target = pair.target;

  {
    const double v = score_pair(kNameEdit, s, t);
    e.criteria.push_back({Criterion::kNameSimilarity, v,
                          "edit similarity of '" + s.canonical.canonical + "' and '" +
                              t.canonical.canonical + "' is " + fmt(v)});
  }
  {
    const double v = score_pair(kNameTokenJaccard, s, t);
    const auto common = shared_tokens(s.canonical.tokens, t.canonical.tokens);
    e.criteria.push_back({Criterion::kTokenPatterns, v,
                          common.empty() ? "no shared name tokens"
                                         : "shared tokens: " + join(common) + " (Jaccard " +
                                               fmt(v) + ")"});
  }
  if (s.description && t.description) {
    const auto a = canonicalize_name(*s.description).tokens;
    const auto b = canonicalize_name(*t.description).tokens;
    const double v = token_jaccard(a, b);
    e.criteria.push_back({Criterion::kSemanticMeaning, v,
                          "description token overlap " + fmt(v)});
  } else {
    e.criteria.push_back({Criterion::kSemanticMeaning, std::nullopt,
                          "description missing on " +
                              std::string(!s.description ? "source" : "target") + " side"});
  }

  const bool both_have_values = s.has_values() && t.has_values();
  if (!both_have_values) {
    const std::string side = !s.has_values() ? "source" : "target";
    e.criteria.push_back({Criterion::kValueCompatibility, std::nullopt,
                          "no values on " + side + " side"});
    e.criteria.push_back({Criterion::kDistributionPatterns, std::nullopt,
                          "no values on " + side + " side"});
  } else {
    const std::string types = std::string(to_string(s.type)) + " vs " + std::string(to_string(t.type));
    if (s.type != t.type) {
      e.criteria.push_back({Criterion::kValueCompatibility, 0.0, "type clash: " + types});
      e.criteria.push_back({Criterion::kDistributionPatterns, std::nullopt,
                            "distributions not comparable across " + types});
    } else {
      if (s.type == InferredType::kCategorical) {
        const double overlap = score_pair(kValueOverlap, s, t);
        e.criteria.push_back({Criterion::kValueCompatibility, 0.5 + 0.5 * overlap,
                              "both categorical, value overlap " + fmt(overlap)});
      } else {
        e.criteria.push_back({Criterion::kValueCompatibility, 1.0, "both " + std::string(to_string(s.type))});
      }
      const double d = score_pair(kDistribution, s, t);
      e.criteria.push_back({Criterion::kDistributionPatterns, d,
                            s.type == InferredType::kNumeric
                                ? "histogram similarity (1 - total variation) " + fmt(d)
                                : "value set Jaccard " + fmt(d)});
    }
  }

  if (history && !history->empty()) {
    const bool hit = history->count(pair) > 0;
    e.criteria.push_back({Criterion::kHistoricalMappings, hit ? 1.0 : 0.0,
                          hit ? "pair appears in historical mappings"
                              : "pair absent from historical mappings"});
  } else {
    e.criteria.push_back({Criterion::kHistoricalMappings, std::nullopt, "no history loaded"});
  }

  if (synonyms && !synonyms->empty() && synonyms->equivalent(s.name, t.name)) {
    e.criteria.push_back({Criterion::kDomainKnowledge, 1.0, "names are listed as synonyms"});
  } else {
    e.criteria.push_back({Criterion::kDomainKnowledge, std::nullopt,
                          synonyms && !synonyms->empty() ? "no synonym entry for this pair"
                                                         : "no synonym file loaded"});
  }

  e.diagnosis = diagnose(e.criteria);
  return e;
}

Diagnosis diagnose(std::span<const CriterionResult> criteria) {
  double total = 0.0;
  std::size_t n = 0;
  for (const auto& c : criteria) {
    if (!c.score) continue;
    if (c.name == Criterion::kValueCompatibility && *c.score == 0.0) {
      return Diagnosis::kLikelyMismatch;
    }
    total += *c.score;
    ++n;
  }
  if (n == 0) return Diagnosis::kUndetermined;
  const double mean = total / static_cast<double>(n);
  if (mean >= 0.6) return Diagnosis::kLikelyMatch;
  if (mean <= 0.4) return Diagnosis::kLikelyMismatch;
  return Diagnosis::kUndetermined;
}

// --- narrative -------------------------------------------------------------

LlmConfig LlmConfig::from_env() {
  LlmConfig c;
  if (const char* v = std::getenv("MATCHBENCH_LLM_URL")) c.url = v;
  if (const char* v = std::getenv("MATCHBENCH_LLM_KEY")) c.api_key = v;
  if (const char* v = std::getenv("MATCHBENCH_LLM_MODEL")) c.model = v;
  return c;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

std::optional<Endpoint> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return Endpoint{url, "/"};
  return Endpoint{url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

NarrativeResult llm_narrative(const Explanation& explanation, const LlmConfig& config) {
  NarrativeResult result;
  if (!config.enabled()) return result;
  const auto endpoint = split_url(config.url);
  if (!endpoint) {
    result.warning = "invalid llm endpoint url";
    return result;
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (endpoint->origin.starts_with("https://")) {
    result.warning = "https llm endpoints need a TLS-enabled build";
    return result;
  }
#endif

  nlohmann::json context = explanation;
  context.erase("narrative");
  context.erase("warnings");
  const nlohmann::json body{
      {"model", config.model},
      {"messages",
       {{{"role", "system"},
         {"content",
          "You review schema-matching candidates. Summarize the criterion evidence "
          "for the curator in a short paragraph. Do not change the diagnosis."}},
        {{"role", "user"}, {"content", context.dump()}}}}};

  httplib::Client client(endpoint->origin);
  const auto secs = static_cast<time_t>(config.timeout_seconds);
  const auto usecs = static_cast<time_t>((config.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!config.api_key.empty()) headers.emplace("Authorization", "Bearer " + config.api_key);

  const auto res = client.Post(endpoint->path, headers, body.dump(), "application/json");
  if (!res) {
    result.warning = "llm endpoint unreachable: " + httplib::to_string(res.error());
    return result;
  }
  if (res->status < 200 || res->status >= 300) {
    result.warning = "llm endpoint returned HTTP " + std::to_string(res->status);
    return result;
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  try {
    if (!reply.is_discarded()) {
      result.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      return result;
    }
  } catch (const nlohmann::json::exception&) {
  }
  result.warning = "llm endpoint reply lacks choices[0].message.content";
  return result;
}

void attach_narrative(Explanation& explanation, const LlmConfig& config) {
  auto r = llm_narrative(explanation, config);
  if (r.text) explanation.narrative = std::move(r.text);
  if (r.warning) explanation.warnings.push_back(std::move(*r.warning));
}

void to_json(nlohmann::json& j, const Explanation& e) {
  auto criteria = nlohmann::json::array();
  for (const auto& c : e.criteria) {
    criteria.push_back({{"name", to_string(c.name)},
                        {"score", c.score ? nlohmann::json(*c.score) : nlohmann::json()},
                        {"evidence", c.evidence}});
  }
  j = nlohmann::json{{"source", e.source},
                     {"target", e.target},
                     {"criteria", std::move(criteria)},
                     {"diagnosis", to_string(e.diagnosis)},
                     {"warnings", e.warnings}};
  if (e.narrative) j["narrative"] = *e.narrative;
}

}  // namespace matchbench
