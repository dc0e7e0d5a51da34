#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "equiv.hpp"
#include "report.hpp"

namespace orbiteq {

/// Golden table: "<matrix>.<key> = <value>" and "<A>~<B>.<relation> = <status>".
using GoldenTable = std::vector<std::pair<std::string, std::string>>;

inline GoldenTable parse_golden(std::string const &text) {
  GoldenTable out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find(" = ");
    if (eq == std::string::npos) throw std::invalid_argument("bad golden line: " + line);
    out.emplace_back(line.substr(0, eq), line.substr(eq + 3));
  }
  return out;
}

struct SuiteCheck {
  std::string key, expected, actual;
  bool ok() const { return expected == actual; }
  friend bool operator==(SuiteCheck const &, SuiteCheck const &) = default;
};

struct SuiteOutcome {
  std::vector<SuiteCheck> checks;
  bool contradiction = false;

  int failed() const {
    int f = 0;
    for (auto const &c : checks) f += c.ok() ? 0 : 1;
    return f;
  }
  std::optional<std::string> first_failure() const {
    for (auto const &c : checks)
      if (!c.ok()) return c.key;
    return std::nullopt;
  }
  friend bool operator==(SuiteOutcome const &, SuiteOutcome const &) = default;
};

/// Evaluates every golden entry against matrices loaded from `data_dir/<name>.txt`.
inline SuiteOutcome run_examples(std::filesystem::path const &data_dir, GoldenTable const &golden, ClassifyOptions const &opt = {}) {
  SuiteOutcome outcome;
  std::map<std::string, std::optional<TransitionMatrix>> matrices;
  std::map<std::string, std::string> load_errors;
  auto matrix = [&](std::string const &name) -> std::optional<TransitionMatrix> const & {
    auto it = matrices.find(name);
    if (it != matrices.end()) return it->second;
    try {
      matrices[name] = load_matrix((data_dir / (name + ".txt")).string());
    } catch (std::exception const &e) {
      matrices[name] = std::nullopt;
      load_errors[name] = e.what();
    }
    return matrices[name];
  };
  std::map<std::string, Json> invariant_cache;
  std::map<std::string, std::string> relation_cache;

  for (auto const &[key, expected] : golden) {
    auto dot = key.rfind('.');
    std::string subject = key.substr(0, dot), field = key.substr(dot + 1);
    std::string actual;
    auto tilde = subject.find('~');
    if (tilde == std::string::npos) {
      auto const &m = matrix(subject);
      if (!m) {
        actual = "invalid matrix " + subject + ": " + load_errors[subject];
      } else {
        auto it = invariant_cache.find(subject);
        if (it == invariant_cache.end()) it = invariant_cache.emplace(subject, invariants_json(subject, *m)).first;
        actual = it->second.contains(field) ? flat_value_text(it->second[field]) : "missing";
      }
    } else {
      std::string an = subject.substr(0, tilde), bn = subject.substr(tilde + 1);
      auto const &a = matrix(an);
      auto const &b = matrix(bn);
      if (!a || !b) {
        actual = "invalid matrix " + (a ? bn : an);
      } else {
        if (!relation_cache.count(subject + ".COE")) {
          try {
            auto rep = classify(*a, *b, {}, opt, an, bn);
            for (Relation r : all_relations) relation_cache[subject + "." + to_string(r)] = to_string(rep[r].status);
          } catch (ContradictoryEvidence const &e) {
            outcome.contradiction = true;
            for (Relation r : all_relations) relation_cache[subject + "." + to_string(r)] = std::string("ContradictoryEvidence: ") + e.what();
          }
        }
        auto it = relation_cache.find(key);
        actual = it == relation_cache.end() ? "missing" : it->second;
      }
    }
    outcome.checks.push_back({key, expected, actual});
  }
  return outcome;
}

inline Json suite_json(SuiteOutcome const &o) {
  Json j;
  Json checks = Json::array();
  for (auto const &c : o.checks) {
    Json cj;
    cj["key"] = c.key;
    cj["expected"] = c.expected;
    cj["actual"] = c.actual;
    cj["ok"] = c.ok();
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["total"] = o.checks.size();
  j["failed"] = o.failed();
  j["contradiction"] = o.contradiction;
  auto first = o.first_failure();
  j["first_failure"] = first ? Json(*first) : Json(nullptr);
  return j;
}

inline SuiteOutcome suite_from_json(Json const &j) {
  SuiteOutcome o;
  for (auto const &cj : j.at("checks"))
    o.checks.push_back({cj.at("key").get<std::string>(), cj.at("expected").get<std::string>(), cj.at("actual").get<std::string>()});
  o.contradiction = j.at("contradiction").get<bool>();
  return o;
}

/// ok   <key> = <value>
/// FAIL <key>: expected <e>, got <a>
inline std::string suite_text(SuiteOutcome const &o) {
  std::string out;
  for (auto const &c : o.checks)
    out += c.ok() ? "ok   " + c.key + " = " + c.actual + "\n" : "FAIL " + c.key + ": expected " + c.expected + ", got " + c.actual + "\n";
  out += "total " + std::to_string(o.checks.size()) + "\n";
  out += "failed " + std::to_string(o.failed()) + "\n";
  out += std::string("contradiction ") + (o.contradiction ? "true" : "false") + "\n";
  auto first = o.first_failure();
  out += "first_failure " + (first ? *first : std::string("-")) + "\n";
  return out;
}

inline SuiteOutcome parse_suite_text(std::string const &text) {
  SuiteOutcome o;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("ok   ", 0) == 0) {
      auto eq = line.find(" = ", 5);
      std::string value = line.substr(eq + 3);
      o.checks.push_back({line.substr(5, eq - 5), value, value});
    } else if (line.rfind("FAIL ", 0) == 0) {
      auto colon = line.find(": expected ", 5);
      auto got = line.find(", got ", colon);
      if (colon == std::string::npos || got == std::string::npos) throw std::invalid_argument("bad FAIL line: " + line);
      o.checks.push_back({line.substr(5, colon - 5), line.substr(colon + 11, got - colon - 11), line.substr(got + 6)});
    } else if (line.rfind("contradiction ", 0) == 0) {
      o.contradiction = line.substr(14) == "true";
    }
  }
  return o;
}

} // namespace orbiteq
