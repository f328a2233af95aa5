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

#include "matchbench/engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <unordered_map>

#include "matchbench/error.hpp"
#include "matchbench/plugin.hpp"

namespace matchbench {

std::string_view to_string(MatcherKind kind) {
  return kind == MatcherKind::kBuiltin ? "builtin" : "external";
}

std::string_view to_string(MatcherStatus status) {
  switch (status) {
    case MatcherStatus::kReady: return "ready";
    case MatcherStatus::kRunning: return "running";
    case MatcherStatus::kFailed: return "failed";
  }
  return "failed";
}

std::string_view to_string(CandidateStatus status) {
  switch (status) {
    case CandidateStatus::kSuggested: return "suggested";
    case CandidateStatus::kAutoAccepted: return "auto_accepted";
    case CandidateStatus::kAccepted: return "accepted";
    case CandidateStatus::kRejected: return "rejected";
    case CandidateStatus::kFlagged: return "flagged";
  }
  return "suggested";
}

CandidateStatus candidate_status_from_string(std::string_view text) {
  for (auto s : {CandidateStatus::kSuggested, CandidateStatus::kAutoAccepted,
                 CandidateStatus::kAccepted, CandidateStatus::kRejected,
                 CandidateStatus::kFlagged}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::kValidation, "unknown candidate status '" + std::string(text) + "'");
}

MatcherSpec MatcherSpec::builtin(std::string_view id, std::size_t top_k) {
  MatcherSpec m;
  m.id = std::string(id);
  m.kind = MatcherKind::kBuiltin;
  m.top_k = top_k;
  return m;
}

MatcherSpec MatcherSpec::external(std::string id, std::vector<std::string> command,
                                  std::size_t top_k) {
  MatcherSpec m;
  m.id = std::move(id);
  m.kind = MatcherKind::kExternal;
  m.command = std::move(command);
  m.top_k = top_k;
  return m;
}

// --- weights ---------------------------------------------------------------

WeightVector WeightVector::uniform(const std::vector<std::string>& ids,
                                   double learning_rate) {
  WeightVector w;
  w.learning_rate = learning_rate;
  for (const auto& id : ids) w.weights[id] = 1.0;
  w.normalize();
  return w;
}

double WeightVector::weight(std::string_view id) const {
  for (const auto& [k, v] : weights) {
    if (k == id) return v;
  }
  return 0.0;
}

double WeightVector::sum() const {
  double s = 0.0;
  for (const auto& [_, v] : weights) s += v;
  return s;
}

void WeightVector::add(const std::string& id) {
  if (weights.count(id)) return;
  const double n = static_cast<double>(weights.size());
  for (auto& [_, v] : weights) v *= n / (n + 1.0);
  weights[id] = 1.0 / (n + 1.0);
  normalize();
}

void WeightVector::remove(std::string_view id) {
  for (auto it = weights.begin(); it != weights.end(); ++it) {
    if (it->first == id) {
      weights.erase(it);
      break;
    }
  }
  normalize();
}

void WeightVector::normalize() {
  if (weights.empty()) return;
  constexpr double kFloor = 1e-12;
  for (int pass = 0; pass < 2; ++pass) {
    const double total = sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      for (auto& [_, v] : weights) v = 1.0;
      continue;
    }
    for (auto& [_, v] : weights) v = std::max(v / total, kFloor);
  }
  const double total = sum();
  for (auto& [_, v] : weights) v /= total;
}

void EngineConfig::validate() const {
  if (!(display_cutoff > 0.0 && display_cutoff <= easy_threshold && easy_threshold <= 1.0)) {
    throw Error(ErrorCode::kValidation,
                "config requires 0 < display_cutoff <= easy_threshold <= 1");
  }
  if (top_k == 0) throw Error(ErrorCode::kValidation, "top_k must be positive");
  if (histogram_bins == 0) throw Error(ErrorCode::kValidation, "histogram_bins must be positive");
  if (!(plugin_timeout.count() > 0.0)) {
    throw Error(ErrorCode::kValidation, "plugin_timeout must be positive");
  }
}

// --- rankings --------------------------------------------------------------

namespace {

bool ranked_before(const ScoredTarget& a, const ScoredTarget& b) {
  return a.score != b.score ? a.score > b.score : a.target < b.target;
}

}  // namespace

void sort_ranked(std::vector<ScoredTarget>& list) {
  std::sort(list.begin(), list.end(), ranked_before);
}

std::optional<std::size_t> MatcherRanking::rank_of(std::string_view source,
                                                   std::string_view target) const {
  auto it = per_source.find(std::string(source));
  if (it == per_source.end()) return std::nullopt;
  for (std::size_t i = 0; i < it->second.size(); ++i) {
    if (it->second[i].target == target) return i + 1;
  }
  return std::nullopt;
}

MatcherRanking run_builtin_matcher(const MatchContext& ctx, std::string_view id,
                                   std::size_t top_k,
                                   const std::function<void(double)>& progress) {
  if (!is_builtin_matcher(id)) {
    throw Error(ErrorCode::kNotFound, "unknown matcher '" + std::string(id) + "'");
  }
  MatcherRanking ranking;
  ranking.matcher_id = std::string(id);
  ranking.top_k = top_k;
  const auto& sources = ctx.sources();
  const auto& targets = ctx.targets();
  std::vector<ScoredTarget> scored;
  scored.reserve(targets.size());
  for (std::size_t i = 0; i < sources.size(); ++i) {
    scored.clear();
    for (const auto& t : targets) {
      const double s = score_pair(id, sources[i], t);
      // Zero carries no evidence and would only pad the list alphabetically.
      if (s > 0.0) scored.push_back({t.name, s});
    }
    const std::size_t keep = std::min(top_k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                      scored.end(), ranked_before);
    scored.resize(keep);
    ranking.per_source.emplace(sources[i].name, scored);
    if (progress) progress(static_cast<double>(i + 1) / static_cast<double>(sources.size()));
  }
  if (sources.empty() && progress) progress(1.0);
  return ranking;
}

std::vector<Pair> detect_easy_matches(const MatchContext& ctx, const EngineConfig& cfg) {
  const auto& sources = ctx.sources();
  const auto& targets = ctx.targets();
  const std::size_t ns = sources.size();
  const std::size_t nt = targets.size();
  if (ns == 0 || nt == 0) return {};

  std::vector<double> sim(ns * nt);
  std::vector<double> row_best(ns, -1.0), col_best(nt, -1.0);
  std::vector<std::size_t> row_ties(ns, 0), col_ties(nt, 0);
  auto bump = [](double v, double& best, std::size_t& ties) {
    if (v > best) {
      best = v;
      ties = 1;
    } else if (v == best) {
      ++ties;
    }
  };
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const auto& a = sources[i].canonical.canonical;
      const auto& b = targets[j].canonical.canonical;
      const double v = a == b ? 1.0 : edit_similarity(a, b);
      sim[i * nt + j] = v;
      bump(v, row_best[i], row_ties[i]);
      bump(v, col_best[j], col_ties[j]);
    }
  }

  std::vector<Pair> easy;
  for (std::size_t i = 0; i < ns; ++i) {
    if (row_ties[i] != 1) continue;
    for (std::size_t j = 0; j < nt; ++j) {
      const double v = sim[i * nt + j];
      if (v != row_best[i]) continue;
      const bool names_equal =
          sources[i].canonical.canonical == targets[j].canonical.canonical;
      if ((names_equal || v >= cfg.easy_threshold) && col_ties[j] == 1 &&
          col_best[j] == v) {
        easy.push_back({sources[i].name, targets[j].name});
      }
      break;
    }
  }
  return easy;
}

// --- candidate table -------------------------------------------------------

CandidateTable::CandidateTable(std::vector<std::string> source_order)
    : source_order_(std::move(source_order)) {}

Candidate& CandidateTable::ensure(const Pair& pair, const MatchContext& ctx) {
  auto it = candidates_.find(pair);
  if (it != candidates_.end()) return it->second;
  const auto& s = ctx.source(pair.source);
  const auto& t = ctx.target(pair.target);
  Candidate c;
  c.source = pair.source;
  c.target = pair.target;
  for (const auto& b : builtin_ids_) c.scores[b] = score_pair(b, s, t);
  return candidates_.emplace(pair, std::move(c)).first->second;
}

void CandidateTable::merge(const MatcherRanking& ranking, const MatchContext& ctx) {
  const std::string& id = ranking.matcher_id;
  if (rankings_.count(id)) drop_matcher(id);
  for (const auto& [source, list] : ranking.per_source) {
    for (const auto& st : list) ensure({source, st.target}, ctx);
  }
  rankings_[id] = ranking;
  if (is_builtin_matcher(id)) {
    builtin_ids_.insert(std::upper_bound(builtin_ids_.begin(), builtin_ids_.end(), id), id);
    for (auto& [pair, c] : candidates_) {
      c.scores[id] = score_pair(id, ctx.source(pair.source), ctx.target(pair.target));
    }
  } else {
    for (const auto& [source, list] : ranking.per_source) {
      for (const auto& st : list) candidates_.at({source, st.target}).scores[id] = st.score;
    }
  }
}

void CandidateTable::drop_matcher(std::string_view id) {
  auto rit = rankings_.find(id);
  if (rit != rankings_.end()) rankings_.erase(rit);
  builtin_ids_.erase(std::remove(builtin_ids_.begin(), builtin_ids_.end(), id),
                     builtin_ids_.end());
  std::set<Pair> backed;
  for (const auto& [_, r] : rankings_) {
    for (const auto& [source, list] : r.per_source) {
      for (const auto& st : list) backed.insert({source, st.target});
    }
  }
  for (auto it = candidates_.begin(); it != candidates_.end();) {
    auto sit = it->second.scores.find(std::string(id));
    if (sit != it->second.scores.end()) it->second.scores.erase(sit);
    if (it->second.status == CandidateStatus::kSuggested && !backed.count(it->first)) {
      it = candidates_.erase(it);
    } else {
      ++it;
    }
  }
}

void CandidateTable::recompute_aggregates(const WeightVector& weights) {
  for (auto& [_, c] : candidates_) {
    double total = 0.0;
    for (const auto& [id, w] : weights.weights) {
      auto it = c.scores.find(id);
      if (it != c.scores.end()) total += w * it->second;
    }
    c.aggregate = std::clamp(total, 0.0, 1.0);
  }
}

const Candidate* CandidateTable::find(const Pair& pair) const {
  auto it = candidates_.find(pair);
  return it == candidates_.end() ? nullptr : &it->second;
}

Candidate* CandidateTable::find(const Pair& pair) {
  auto it = candidates_.find(pair);
  return it == candidates_.end() ? nullptr : &it->second;
}

std::vector<const Candidate*> CandidateTable::ranked() const {
  std::unordered_map<std::string_view, std::size_t> order;
  for (std::size_t i = 0; i < source_order_.size(); ++i) order.emplace(source_order_[i], i);
  auto pos = [&](const std::string& s) {
    auto it = order.find(s);
    return it == order.end() ? source_order_.size() : it->second;
  };
  std::vector<const Candidate*> out;
  out.reserve(candidates_.size());
  for (const auto& [_, c] : candidates_) out.push_back(&c);
  std::stable_sort(out.begin(), out.end(), [&](const Candidate* a, const Candidate* b) {
    const auto pa = pos(a->source);
    const auto pb = pos(b->source);
    if (pa != pb) return pa < pb;
    if (a->source != b->source) return a->source < b->source;
    if (a->aggregate != b->aggregate) return a->aggregate > b->aggregate;
    return a->target < b->target;
  });
  return out;
}

WeightVector update_weights(const WeightVector& weights, Feedback decision,
                            const Pair& pair, const CandidateTable& table) {
  if (!table.find(pair)) {
    throw Error(ErrorCode::kNotFound,
                "unknown candidate " + pair.source + " -> " + pair.target);
  }
  WeightVector next = weights;
  const double sign = decision == Feedback::kAccept ? 1.0 : -1.0;
  for (auto& [id, w] : next.weights) {
    double reward = 0.0;
    auto it = table.rankings().find(id);
    if (it != table.rankings().end()) {
      if (auto rank = it->second.rank_of(pair.source, pair.target)) {
        reward = 1.0 / static_cast<double>(*rank);
      }
    }
    w *= std::exp(sign * next.learning_rate * reward);
  }
  next.normalize();
  return next;
}

GenerationResult generate_candidates(const MatchContext& ctx,
                                     std::vector<MatcherSpec> matchers,
                                     const WeightVector& weights,
                                     const EngineConfig& cfg) {
  cfg.validate();
  if (matchers.empty()) throw Error(ErrorCode::kValidation, "no matchers requested");
  std::set<std::string> ids;
  for (const auto& m : matchers) {
    if (!ids.insert(m.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate matcher id '" + m.id + "'");
    }
  }

  std::vector<std::future<PluginRun>> jobs;
  jobs.reserve(matchers.size());
  for (auto& spec : matchers) {
    jobs.push_back(std::async(std::launch::async, [&ctx, &cfg, spec]() mutable {
      if (spec.kind == MatcherKind::kExternal) {
        return run_external_matcher(std::move(spec), ctx, cfg.plugin_timeout);
      }
      PluginRun run;
      if (!is_builtin_matcher(spec.id)) {
        spec.status = MatcherStatus::kFailed;
        spec.failure_reason = "unknown builtin matcher";
      } else {
        run.ranking = run_builtin_matcher(ctx, spec.id, spec.top_k);
        spec.status = MatcherStatus::kReady;
      }
      run.spec = std::move(spec);
      return run;
    }));
  }

  std::vector<std::string> order;
  for (const auto& s : ctx.sources()) order.push_back(s.name);
  GenerationResult result{CandidateTable(std::move(order)), {}, weights};
  std::string reasons;
  for (auto& job : jobs) {
    PluginRun run = job.get();
    if (run.spec.status == MatcherStatus::kReady && run.ranking) {
      result.table.merge(*run.ranking, ctx);
      result.weights.add(run.spec.id);
    } else {
      result.weights.remove(run.spec.id);
      if (!reasons.empty()) reasons += "; ";
      reasons += run.spec.id + ": " + run.spec.failure_reason.value_or("failed");
    }
    result.matchers.push_back(std::move(run.spec));
  }
  // Drop weights for ids that were not part of this run.
  for (auto it = result.weights.weights.begin(); it != result.weights.weights.end();) {
    const bool ready = std::any_of(result.matchers.begin(), result.matchers.end(), [&](auto& m) {
      return m.id == it->first && m.status == MatcherStatus::kReady;
    });
    it = ready ? std::next(it) : result.weights.weights.erase(it);
  }
  if (result.weights.weights.empty()) {
    throw Error(ErrorCode::kEngine, "all matchers failed: " + reasons);
  }
  result.weights.normalize();
  result.table.recompute_aggregates(result.weights);
  return result;
}

// --- json ------------------------------------------------------------------

void to_json(nlohmann::json& j, const MatcherSpec& m) {
  j = nlohmann::json{{"id", m.id},
                     {"kind", to_string(m.kind)},
                     {"top_k", m.top_k},
                     {"status", to_string(m.status)}};
  if (!m.command.empty()) j["command"] = m.command;
  if (m.failure_reason) j["failure_reason"] = *m.failure_reason;
}

void from_json(const nlohmann::json& j, MatcherSpec& m) {
  m.id = j.at("id").get<std::string>();
  m.kind = j.at("kind") == "external" ? MatcherKind::kExternal : MatcherKind::kBuiltin;
  m.top_k = j.value("top_k", std::size_t{10});
  const auto status = j.value("status", std::string("ready"));
  m.status = status == "ready"     ? MatcherStatus::kReady
             : status == "running" ? MatcherStatus::kRunning
                                   : MatcherStatus::kFailed;
  m.command = j.value("command", std::vector<std::string>{});
  if (j.contains("failure_reason")) m.failure_reason = j["failure_reason"].get<std::string>();
}

void to_json(nlohmann::json& j, const Candidate& c) {
  j = nlohmann::json{{"source", c.source},
                     {"target", c.target},
                     {"scores", c.scores},
                     {"aggregate", c.aggregate},
                     {"status", to_string(c.status)}};
  if (c.note) j["note"] = *c.note;
}

void from_json(const nlohmann::json& j, Candidate& c) {
  c.source = j.at("source").get<std::string>();
  c.target = j.at("target").get<std::string>();
  c.scores = j.at("scores").get<std::map<std::string, double>>();
  c.aggregate = j.at("aggregate").get<double>();
  c.status = candidate_status_from_string(j.at("status").get<std::string>());
  if (j.contains("note")) c.note = j["note"].get<std::string>();
}

void to_json(nlohmann::json& j, const WeightVector& w) {
  j = nlohmann::json{{"weights", w.weights}, {"learning_rate", w.learning_rate}};
}

void from_json(const nlohmann::json& j, WeightVector& w) {
  w.weights = j.at("weights").get<std::map<std::string, double>>();
  w.learning_rate = j.value("learning_rate", 0.1);
}

void to_json(nlohmann::json& j, const EngineConfig& c) {
  j = nlohmann::json{{"easy_threshold", c.easy_threshold},
                     {"display_cutoff", c.display_cutoff},
                     {"top_k", c.top_k},
                     {"histogram_bins", c.histogram_bins},
                     {"plugin_timeout", c.plugin_timeout.count()}};
}

void from_json(const nlohmann::json& j, EngineConfig& c) {
  EngineConfig d;
  c.easy_threshold = j.value("easy_threshold", d.easy_threshold);
  c.display_cutoff = j.value("display_cutoff", d.display_cutoff);
  c.top_k = j.value("top_k", d.top_k);
  c.histogram_bins = j.value("histogram_bins", d.histogram_bins);
  c.plugin_timeout = std::chrono::duration<double>(
      j.value("plugin_timeout", d.plugin_timeout.count()));
}

void to_json(nlohmann::json& j, const MatcherRanking& r) {
  auto per = nlohmann::json::object();
  for (const auto& [source, list] : r.per_source) {
    auto arr = nlohmann::json::array();
    for (const auto& st : list) arr.push_back({st.target, st.score});
    per[source] = std::move(arr);
  }
  j = nlohmann::json{{"matcher", r.matcher_id}, {"top_k", r.top_k}, {"per_source", per}};
}

void from_json(const nlohmann::json& j, MatcherRanking& r) {
  r.matcher_id = j.at("matcher").get<std::string>();
  r.top_k = j.at("top_k").get<std::size_t>();
  r.per_source.clear();
  for (const auto& [source, arr] : j.at("per_source").items()) {
    std::vector<ScoredTarget> list;
    for (const auto& e : arr) list.push_back({e.at(0).get<std::string>(), e.at(1).get<double>()});
    r.per_source.emplace(source, std::move(list));
  }
}

void to_json(nlohmann::json& j, const CandidateTable& t) {
  auto cands = nlohmann::json::array();
  for (const auto& [_, c] : t.candidates_) cands.push_back(c);
  auto rankings = nlohmann::json::object();
  for (const auto& [id, r] : t.rankings_) rankings[id] = r;
  j = nlohmann::json{{"source_order", t.source_order_},
                     {"builtins", t.builtin_ids_},
                     {"candidates", std::move(cands)},
                     {"rankings", std::move(rankings)}};
}

void from_json(const nlohmann::json& j, CandidateTable& t) {
  t.source_order_ = j.at("source_order").get<std::vector<std::string>>();
  t.builtin_ids_ = j.at("builtins").get<std::vector<std::string>>();
  t.candidates_.clear();
  for (const auto& cj : j.at("candidates")) {
    Candidate c = cj.get<Candidate>();
    t.candidates_.emplace(c.pair(), std::move(c));
  }
  t.rankings_.clear();
  for (const auto& [id, rj] : j.at("rankings").items()) t.rankings_[id] = rj.get<MatcherRanking>();
}

}  // namespace matchbench
