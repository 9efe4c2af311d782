#ifndef MSR_MANIFEST_HPP
#define MSR_MANIFEST_HPP

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/common.hpp"

namespace msr {

// GQM study definition: a goal, the research questions derived from it,
// and the metrics that answer them.

struct StudyGoal {
  std::string object;
  std::string purpose;
  std::string quality_focus;
  std::string viewpoint;
  std::string context;

  bool operator==(const StudyGoal&) const = default;
};

struct ResearchQuestion {
  std::string id;
  std::string text;
  std::vector<std::string> metric_ids;

  bool operator==(const ResearchQuestion&) const = default;
};

enum class MetricKind { atomic, composite };

struct MetricBinding {
  std::string id;
  std::string name;
  std::string definition;
  std::string unit;
  MetricKind kind = MetricKind::atomic;

  bool operator==(const MetricBinding&) const = default;
};

struct StudyManifest {
  StudyGoal goal;
  std::vector<ResearchQuestion> questions;
  std::vector<MetricBinding> metrics;

  bool operator==(const StudyManifest&) const = default;
};

enum class Severity { error, warning };

inline const char* severity_name(Severity s) {
  return s == Severity::error ? "ERROR" : "WARN";
}

struct Finding {
  Severity severity;
  std::string code;
  std::string subject;  // RQ or metric id the finding refers to, "" for global
  std::string message;

  bool operator==(const Finding&) const = default;
};

namespace detail {

inline std::string require_goal_field(const nlohmann::json& goal,
                                      const char* key) {
  if (!goal.contains(key) || !goal[key].is_string())
    throw Error(Errc::missing_goal_field, std::string("goal.") + key);
  std::string v = trim(goal[key].get<std::string>());
  if (v.empty())
    throw Error(Errc::missing_goal_field,
                std::string("goal.") + key + " is empty");
  return v;
}

}  // namespace detail

/// Parses the JSON study definition. Questions may reference only
/// declared metrics; unreferenced metrics are tolerated here and
/// reported by validate_manifest.
inline StudyManifest parse_manifest(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_document, e.what());
  }
  if (!doc.is_object() || !doc.contains("goal") || !doc["goal"].is_object())
    throw Error(Errc::malformed_document, "top-level goal object required");

  StudyManifest m;
  const auto& goal = doc["goal"];
  m.goal.object = detail::require_goal_field(goal, "object");
  m.goal.purpose = detail::require_goal_field(goal, "purpose");
  m.goal.quality_focus = detail::require_goal_field(goal, "quality_focus");
  m.goal.viewpoint = detail::require_goal_field(goal, "viewpoint");
  m.goal.context = detail::require_goal_field(goal, "context");

  if (!doc.contains("metrics") || !doc["metrics"].is_array())
    throw Error(Errc::malformed_document, "metrics array required");
  std::set<std::string> metric_ids;
  for (const auto& jm : doc["metrics"]) {
    MetricBinding b;
    try {
      b.id = jm.at("id").get<std::string>();
      b.name = jm.at("name").get<std::string>();
      b.definition = jm.value("definition", std::string());
      b.unit = jm.value("unit", std::string());
      std::string kind = jm.value("kind", std::string("atomic"));
      if (kind == "atomic") b.kind = MetricKind::atomic;
      else if (kind == "composite") b.kind = MetricKind::composite;
      else throw Error(Errc::malformed_document, "metric kind: " + kind);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_document, e.what());
    }
    if (!metric_ids.insert(b.id).second)
      throw Error(Errc::duplicate_metric_id, b.id);
    m.metrics.push_back(std::move(b));
  }

  if (!doc.contains("questions") || !doc["questions"].is_array() ||
      doc["questions"].empty())
    throw Error(Errc::malformed_document, "non-empty questions array required");
  std::set<std::string> question_ids;
  for (const auto& jq : doc["questions"]) {
    ResearchQuestion q;
    try {
      q.id = jq.at("id").get<std::string>();
      q.text = jq.at("text").get<std::string>();
      for (const auto& mid : jq.value("metrics", nlohmann::json::array()))
        q.metric_ids.push_back(mid.get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::malformed_document, e.what());
    }
    if (!question_ids.insert(q.id).second)
      throw Error(Errc::duplicate_question_id, q.id);
    for (const auto& mid : q.metric_ids)
      if (!metric_ids.count(mid))
        throw Error(Errc::unknown_metric_ref, q.id + " -> " + mid);
    m.questions.push_back(std::move(q));
  }
  return m;
}

inline std::string serialize_manifest(const StudyManifest& m) {
  nlohmann::json doc;
  doc["goal"] = {{"object", m.goal.object},
                 {"purpose", m.goal.purpose},
                 {"quality_focus", m.goal.quality_focus},
                 {"viewpoint", m.goal.viewpoint},
                 {"context", m.goal.context}};
  doc["questions"] = nlohmann::json::array();
  for (const auto& q : m.questions)
    doc["questions"].push_back(
        {{"id", q.id}, {"text", q.text}, {"metrics", q.metric_ids}});
  doc["metrics"] = nlohmann::json::array();
  for (const auto& b : m.metrics)
    doc["metrics"].push_back(
        {{"id", b.id},
         {"name", b.name},
         {"definition", b.definition},
         {"unit", b.unit},
         {"kind", b.kind == MetricKind::atomic ? "atomic" : "composite"}});
  return doc.dump(2) + "\n";
}

/// Design review of a parsed manifest. Findings come back in a fixed
/// order: errors before warnings, then by code, then by subject id.
inline std::vector<Finding> validate_manifest(const StudyManifest& m) {
  std::vector<Finding> findings;
  std::set<std::string> declared;
  for (const auto& b : m.metrics) declared.insert(b.id);

  std::set<std::string> referenced;
  for (const auto& q : m.questions) {
    size_t resolvable = 0;
    for (const auto& mid : q.metric_ids) {
      if (declared.count(mid)) {
        ++resolvable;
        referenced.insert(mid);
      }
    }
    if (resolvable == 0)
      findings.push_back({Severity::error, "UNBOUND_RQ", q.id,
                          "research question " + q.id +
                              " maps to no resolvable metric"});
  }
  if (m.questions.size() > 5)
    findings.push_back({Severity::warning, "TOO_MANY_RQS", "",
                        std::to_string(m.questions.size()) +
                            " research questions; two or three usually "
                            "suffice"});
  for (const auto& b : m.metrics)
    if (!referenced.count(b.id))
      findings.push_back({Severity::warning, "UNREFERENCED_METRIC", b.id,
                          "metric " + b.id + " is not used by any question"});

  std::sort(findings.begin(), findings.end(),
            [](const Finding& a, const Finding& b) {
              if (a.severity != b.severity)
                return a.severity == Severity::error;
              if (a.code != b.code) return a.code < b.code;
              return a.subject < b.subject;
            });
  return findings;
}

/// Renders the five-clause goal statement.
inline std::string render_goal_statement(const StudyGoal& g) {
  auto field = [](const std::string& v, const char* name) {
    std::string t = trim(v);
    if (t.empty()) throw Error(Errc::empty_goal_field, name);
    return t;
  };
  return "Analyze " + field(g.object, "object") + " for the purpose of " +
         field(g.purpose, "purpose") + " with respect to " +
         field(g.quality_focus, "quality_focus") + " from the viewpoint of " +
         field(g.viewpoint, "viewpoint") + " in the context of " +
         field(g.context, "context");
}

}  // namespace msr

#endif  // MSR_MANIFEST_HPP
