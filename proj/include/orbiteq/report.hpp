#pragma once

#include <cctype>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "equiv.hpp"
#include "invariants.hpp"

namespace orbiteq {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Flat "key value" blocks (one scalar, string or integer list per line)

inline std::string flat_value_text(Json const &v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline Json flat_value_parse(std::string const &s) {
  if (!s.empty() && s.front() == '[') return Json::parse(s);
  if (s == "true") return true;
  if (s == "false") return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  bool integer = s.size() > i;
  for (std::size_t k = i; k < s.size(); ++k) integer = integer && std::isdigit(static_cast<unsigned char>(s[k]));
  if (integer) return std::stoll(s);
  return s;
}

inline std::string flat_text(Json const &obj) {
  std::string out;
  for (auto const &[k, v] : obj.items()) out += k + " " + flat_value_text(v) + "\n";
  return out;
}

inline Json flat_from_text(std::string const &text) {
  Json obj = Json::object();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto sp = line.find(' ');
    if (sp == std::string::npos) throw std::invalid_argument("bad key-value line: " + line);
    obj[line.substr(0, sp)] = flat_value_parse(line.substr(sp + 1));
  }
  return obj;
}

// ---------------------------------------------------------------------------
// Per-matrix invariant block

inline Json invariants_json(std::string const &name, TransitionMatrix const &a) {
  Json j;
  j["matrix"] = name;
  j["n"] = a.size();
  j["det_id_minus"] = det_id_minus(a);
  KGroups k = k_groups(a);
  j["k0_factors"] = k.k0.invariant_factors;
  j["k0_unit"] = k.k0.unit_class;
  j["k0_unit_order"] = unit_order(k.k0);
  j["k1_rank"] = k.k1_rank;
  auto g = dimension_group(a);
  j["dimgroup_rank"] = g.eventual_rank;
  if (g.status == DimensionGroupStatus::Ok) {
    j["dimgroup_lambda"] = g.lambda;
    j["dimgroup_weight"] = g.weight;
    j["dimgroup_unit"] = g.unit_value;
  } else {
    j["dimgroup_lambda"] = "unsupported";
    j["dimgroup_weight"] = "unsupported";
    j["dimgroup_unit"] = "unsupported";
  }
  j["charpoly"] = format_polynomial(char_poly(a));
  return j;
}

// ---------------------------------------------------------------------------
// Relation reports

inline Json report_json(RelationReport const &rep) {
  Json j;
  j["A"] = rep.a_name;
  j["B"] = rep.b_name;
  Json rels = Json::array();
  for (Relation r : all_relations) {
    Json rj;
    rj["relation"] = to_string(r);
    rj["status"] = to_string(rep[r].status);
    Json ev = Json::array();
    for (auto const &e : rep[r].evidence) {
      Json ej;
      ej["name"] = e.name;
      ej["values"] = Json::object();
      for (auto const &[k, v] : e.values) ej["values"][k] = v;
      ev.push_back(ej);
    }
    rj["evidence"] = ev;
    rels.push_back(rj);
  }
  j["relations"] = rels;
  j["notes"] = rep.notes;
  return j;
}

inline RelationReport report_from_json(Json const &j) {
  RelationReport rep;
  rep.a_name = j.at("A").get<std::string>();
  rep.b_name = j.at("B").get<std::string>();
  for (auto const &rj : j.at("relations")) {
    auto r = relation_from_string(rj.at("relation").get<std::string>());
    auto s = status_from_string(rj.at("status").get<std::string>());
    if (!r || !s) throw std::invalid_argument("bad relation entry");
    rep[*r].status = *s;
    for (auto const &ej : rj.at("evidence")) {
      Evidence e{ej.at("name").get<std::string>(), {}};
      for (auto const &[k, v] : ej.at("values").items()) e.values[k] = v.get<std::string>();
      rep[*r].evidence.push_back(std::move(e));
    }
  }
  for (auto const &n : j.at("notes")) rep.notes.push_back(n.get<std::string>());
  return rep;
}

/// pair A B
/// COE Established
///   evidence <name>
///     <key> <value>
/// note <text>
inline std::string report_text(RelationReport const &rep) {
  std::string out = "pair " + rep.a_name + " " + rep.b_name + "\n";
  for (Relation r : all_relations) {
    out += std::string(to_string(r)) + " " + to_string(rep[r].status) + "\n";
    for (auto const &e : rep[r].evidence) {
      out += "  evidence " + e.name + "\n";
      for (auto const &[k, v] : e.values) out += "    " + k + " " + v + "\n";
    }
  }
  for (auto const &n : rep.notes) out += "note " + n + "\n";
  return out;
}

inline RelationReport parse_report_text(std::string const &text) {
  RelationReport rep;
  std::istringstream in(text);
  std::string line;
  std::optional<Relation> current;
  auto split = [](std::string const &s) {
    auto sp = s.find(' ');
    if (sp == std::string::npos) return std::make_pair(s, std::string());
    return std::make_pair(s.substr(0, sp), s.substr(sp + 1));
  };
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!header) {
      std::istringstream ls(line);
      std::string kw;
      ls >> kw >> rep.a_name >> rep.b_name;
      if (kw != "pair") throw std::invalid_argument("report must start with 'pair A B'");
      header = true;
      continue;
    }
    if (line.rfind("    ", 0) == 0) {
      if (!current || rep[*current].evidence.empty())
        throw std::invalid_argument("value line outside evidence");
      auto [k, v] = split(line.substr(4));
      rep[*current].evidence.back().values[k] = v;
    } else if (line.rfind("  evidence ", 0) == 0) {
      if (!current) throw std::invalid_argument("evidence outside relation");
      rep[*current].evidence.push_back({line.substr(11), {}});
    } else if (line.rfind("note ", 0) == 0) {
      rep.notes.push_back(line.substr(5));
    } else {
      auto [name, status] = split(line);
      current = relation_from_string(name);
      auto s = status_from_string(status);
      if (!current || !s) throw std::invalid_argument("bad relation line: " + line);
      rep[*current].status = *s;
    }
  }
  return rep;
}

} // namespace orbiteq
