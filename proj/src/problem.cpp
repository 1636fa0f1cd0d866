#include "covfield/problem.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "covfield/errors.hpp"
#include "covfield/parser.hpp"

namespace covfield::cli {

using symexpr::BundleKind;
using symexpr::CoordRole;
using symexpr::ParseContext;

namespace {

struct IniValue {
  std::string text;
  int line = 0;
};

using IniSection = std::map<std::string, IniValue>;

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::map<std::string, IniSection> scan_ini(const std::string& text) {
  std::map<std::string, IniSection> sections;
  std::istringstream in(text);
  std::string raw;
  std::string current;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        throw spec_error("line " + std::to_string(line) +
                         ": unterminated section header");
      current = trim(s.substr(1, s.size() - 2));
      if (current.empty())
        throw spec_error("line " + std::to_string(line) + ": empty section name");
      sections[current];
      continue;
    }
    size_t eq = s.find('=');
    if (eq == std::string::npos)
      throw spec_error("line " + std::to_string(line) +
                       ": expected 'key = value'");
    if (current.empty())
      throw spec_error("line " + std::to_string(line) +
                       ": key outside of any section");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      throw spec_error("line " + std::to_string(line) + ": empty key");
    auto& section = sections[current];
    if (section.count(key))
      throw spec_error("line " + std::to_string(line) + ": duplicate key '" +
                       key + "' in section [" + current + "]");
    section[key] = {value, line};
  }
  return sections;
}

std::vector<std::string> split_names(const std::string& value) {
  std::vector<std::string> names;
  std::string cur;
  for (char c : value) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) names.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) names.push_back(cur);
  return names;
}

Scalar parse_value(const IniValue& v, const ParseContext& ctx) {
  try {
    return symexpr::parse_scalar(v.text, ctx);
  } catch (const Error& e) {
    throw spec_error("line " + std::to_string(v.line) + ": " + e.what());
  }
}

const IniValue& require_key(const std::map<std::string, IniSection>& sections,
                            const std::string& section, const std::string& key) {
  auto s = sections.find(section);
  if (s == sections.end())
    throw spec_error("missing [" + section + "] section");
  auto k = s->second.find(key);
  if (k == s->second.end())
    throw spec_error("section [" + section + "] is missing key '" + key + "'");
  return k->second;
}

void reject_unknown(const std::map<std::string, IniSection>& sections) {
  const std::map<std::string, std::vector<std::string>> known = {
      {"base", {"coords"}},
      {"fiber", {"coords"}},
      {"hamiltonian", {"density"}},
      {"lagrangian", {"density"}},
      {"density", {"rho"}},
      {"chart2", {"base", "fiber"}},
  };
  for (const auto& [name, section] : sections) {
    auto it = known.find(name);
    if (it == known.end())
      throw spec_error("unknown section [" + name + "]");
    for (const auto& [key, value] : section) {
      if (name == "chart2" && (key.rfind("forward.", 0) == 0 ||
                               key.rfind("inverse.", 0) == 0))
        continue;
      bool ok = false;
      for (const auto& k : it->second) ok = ok || k == key;
      if (!ok)
        throw spec_error("line " + std::to_string(value.line) +
                         ": unknown key '" + key + "' in section [" + name + "]");
    }
  }
}

globality::Atlas build_atlas(const IniSection& section, const ChartPtr& yA) {
  auto need = [&section](const std::string& key) -> const IniValue& {
    auto it = section.find(key);
    if (it == section.end())
      throw spec_error("section [chart2] is missing key '" + key + "'");
    return it->second;
  };
  ChartPtr yB = symexpr::make_fibred_chart(
      split_names(need("base").text), split_names(need("fiber").text));

  std::map<int, Scalar> forward, inverse;
  for (int pos = 0; pos < yB->dim(); ++pos) {
    const std::string& name = yB->coords[pos].name;
    forward[pos] = parse_value(need("forward." + name), ParseContext{yA, {}});
  }
  for (int pos = 0; pos < yA->dim(); ++pos) {
    const std::string& name = yA->coords[pos].name;
    inverse[pos] = parse_value(need("inverse." + name), ParseContext{yB, {}});
  }
  for (const auto& [key, value] : section) {
    if (key == "base" || key == "fiber") continue;
    std::string name = key.substr(key.find('.') + 1);
    const ChartPtr& chart = key.rfind("forward.", 0) == 0 ? yB : yA;
    if (chart->find_name(name) < 0)
      throw spec_error("line " + std::to_string(value.line) + ": '" + key +
                       "' names no coordinate of its chart");
  }

  try {
    geometry::Transition t =
        geometry::make_transition(yA, yB, std::move(forward), std::move(inverse));
    return globality::make_atlas(
        t, {BundleKind::VstarY, BundleKind::TstarY, BundleKind::J1Y});
  } catch (const Error& e) {
    throw spec_error(std::string("section [chart2]: ") + e.what());
  }
}

}  // namespace

Problem parse_problem(const std::string& text) {
  auto sections = scan_ini(text);
  reject_unknown(sections);

  Problem p;
  p.y = symexpr::make_fibred_chart(
      split_names(require_key(sections, "base", "coords").text),
      split_names(require_key(sections, "fiber", "coords").text));
  p.legendre = symexpr::legendre_bundle_chart(p.y);
  p.homogeneous = symexpr::homogeneous_chart(p.y);
  p.jetLegendre = symexpr::j1_chart(p.legendre);

  p.rho = Scalar::from_int(p.y, 1);
  if (auto s = sections.find("density"); s != sections.end()) {
    const IniValue& v = require_key(sections, "density", "rho");
    p.rho = parse_value(v, ParseContext{p.y, {}});
    bool baseOnly = true;
    for (int pos : symexpr::used_coordinates(p.rho))
      baseOnly = baseOnly && p.y->is_base(pos);
    if (!baseOnly || p.rho.is_zero())
      throw spec_error("line " + std::to_string(v.line) +
                       ": rho must be nonzero and depend only on base coordinates");
  }

  if (sections.count("hamiltonian")) {
    const IniValue& v = require_key(sections, "hamiltonian", "density");
    ParseContext ctx{p.legendre, {{"rho", symexpr::embed(p.rho, p.legendre)}}};
    p.hamiltonian = parse_value(v, ctx);
  }
  if (sections.count("lagrangian")) {
    const IniValue& v = require_key(sections, "lagrangian", "density");
    ChartPtr j1y = symexpr::j1_chart(p.y);
    ParseContext ctx{j1y, {{"rho", symexpr::embed(p.rho, j1y)}}};
    p.lagrangian = parse_value(v, ctx);
  }
  if (sections.count("chart2")) p.atlas = build_atlas(sections["chart2"], p.y);
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem(buf.str());
  } catch (const Error& e) {
    if (e.category() == ErrorCategory::Spec)
      throw spec_error(path + ": " + e.what());
    throw;
  }
}

}  // namespace covfield::cli
