#pragma once
// Model files: a small TOML subset (sections, scalar keys, nested numeric
// arrays, # comments). Every key must be consumed; typos fail loudly.

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "model.hpp"

namespace foldcycle {

struct ConfigValue {
  enum class Kind { number, boolean, string, array };
  Kind kind = Kind::number;
  double num = 0.0;
  bool flag = false;
  std::string str;
  std::vector<ConfigValue> items;
};

using ConfigTable = std::map<std::string, ConfigValue>;

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string drop_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline ConfigValue parse_value(const std::string& text);

inline std::vector<ConfigValue> parse_array_items(const std::string& body) {
  std::vector<ConfigValue> items;
  int depth = 0;
  std::string cur;
  for (char ch : body) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      if (!strip(cur).empty()) items.push_back(parse_value(strip(cur)));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!strip(cur).empty()) items.push_back(parse_value(strip(cur)));
  return items;
}

inline ConfigValue parse_value(const std::string& text) {
  ConfigValue v;
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') {
    v.kind = ConfigValue::Kind::string;
    v.str = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.flag = text == "true";
    return v;
  }
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw ConfigError("unterminated array: " + text);
    v.kind = ConfigValue::Kind::array;
    v.items = parse_array_items(text.substr(1, text.size() - 2));
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(text.c_str(), &end);
  if (end == nullptr || *end != '\0' || text.empty())
    throw ConfigError("cannot parse value: '" + text + "'");
  v.kind = ConfigValue::Kind::number;
  return v;
}

inline int bracket_balance(const std::string& s) {
  int bal = 0;
  bool in_str = false;
  for (char ch : s) {
    if (ch == '"') in_str = !in_str;
    if (in_str) continue;
    if (ch == '[') ++bal;
    if (ch == ']') --bal;
  }
  return bal;
}

}  // namespace detail

inline ConfigTable parse_config(const std::string& text) {
  ConfigTable table;
  std::istringstream in(text);
  std::string line, prefix;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip(detail::drop_comment(line));
    if (line.empty()) continue;

    // Section header lines hold their own brackets; check before balancing.
    if (line.front() == '[' && line.back() == ']' &&
        line.find('=') == std::string::npos) {
      prefix = detail::strip(line.substr(1, line.size() - 2));
      if (prefix.empty()) throw ConfigError("empty section header");
      continue;
    }

    // Multiline arrays: keep appending lines until brackets balance.
    while (detail::bracket_balance(line) > 0) {
      std::string more;
      if (!std::getline(in, more))
        throw ConfigError("unterminated array starting near line " +
                          std::to_string(lineno));
      ++lineno;
      line += ' ';
      line += detail::strip(detail::drop_comment(more));
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value near line " +
                        std::to_string(lineno));
    std::string key = detail::strip(line.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key near line " +
                                       std::to_string(lineno));
    if (!prefix.empty()) key = prefix + "." + key;
    if (table.count(key)) throw ConfigError("duplicate key: " + key);
    table[key] = detail::parse_value(detail::strip(line.substr(eq + 1)));
  }
  return table;
}

namespace detail {

// Tracks key consumption so unknown keys can be rejected wholesale.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigTable& t) : table_(&t) {}

  bool has(const std::string& key) const { return table_->count(key) != 0; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return number(key);
  }

  double number(const std::string& key) {
    const ConfigValue& v = require(key);
    if (v.kind != ConfigValue::Kind::number)
      throw ConfigError("key '" + key + "' must be a number");
    return v.num;
  }

  std::string text(const std::string& key) {
    const ConfigValue& v = require(key);
    if (v.kind != ConfigValue::Kind::string)
      throw ConfigError("key '" + key + "' must be a string");
    return v.str;
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    return text(key);
  }

  const ConfigValue& require(const std::string& key) {
    auto it = table_->find(key);
    if (it == table_->end()) throw ConfigError("missing key: " + key);
    consumed_.insert(key);
    return it->second;
  }

  void finish() const {
    for (const auto& [key, value] : *table_)
      if (!consumed_.count(key))
        throw ConfigError("unknown key: " + key);
  }

 private:
  const ConfigTable* table_;
  std::set<std::string> consumed_;
};

inline std::vector<Monomial> monomial_table(const ConfigValue& v,
                                            const std::string& key) {
  if (v.kind != ConfigValue::Kind::array)
    throw ConfigError("key '" + key + "' must be an array of monomials");
  std::vector<Monomial> out;
  for (const auto& item : v.items) {
    if (item.kind != ConfigValue::Kind::array || item.items.size() != 3)
      throw ConfigError("monomials in '" + key +
                        "' must be [x_power, y_power, coefficient]");
    for (int i = 0; i < 2; ++i)
      if (item.items[i].kind != ConfigValue::Kind::number ||
          item.items[i].num != static_cast<int>(item.items[i].num))
        throw ConfigError("monomial powers in '" + key +
                          "' must be integers");
    Monomial m;
    m.px = static_cast<int>(item.items[0].num);
    m.py = static_cast<int>(item.items[1].num);
    if (item.items[2].kind != ConfigValue::Kind::number)
      throw ConfigError("monomial coefficient in '" + key +
                        "' must be a number");
    m.c = item.items[2].num;
    out.push_back(m);
  }
  return out;
}

inline void check_fold_origin(ConfigReader& r) {
  if (!r.has("fold_point")) return;
  const ConfigValue& v = r.require("fold_point");
  if (v.kind != ConfigValue::Kind::array || v.items.size() != 2 ||
      v.items[0].kind != ConfigValue::Kind::number ||
      v.items[1].kind != ConfigValue::Kind::number ||
      v.items[0].num != 0.0 || v.items[1].num != 0.0)
    throw ConfigError(
        "fold_point must be [0.0, 0.0]; shift the model so the fold sits at "
        "the origin");
}

}  // namespace detail

namespace detail {

inline std::vector<double> number_list(const ConfigValue& v,
                                       const std::string& key,
                                       std::size_t count) {
  if (v.kind != ConfigValue::Kind::array || v.items.size() != count)
    throw ConfigError("key '" + key + "' must be an array of " +
                      std::to_string(count) + " numbers");
  std::vector<double> out;
  for (const auto& item : v.items) {
    if (item.kind != ConfigValue::Kind::number)
      throw ConfigError("key '" + key + "' must hold numbers only");
    out.push_back(item.num);
  }
  return out;
}

}  // namespace detail

inline ModelSpec model_from_config(const ConfigTable& table) {
  detail::ConfigReader r(table);
  const std::string kind = r.text("model");

  ModelSpec model;
  if (kind == "mass_spring") {
    detail::check_fold_origin(r);
    model = make_mass_spring(
        r.number("params.c_L", 0.1), r.number("params.c_R", 0.1),
        r.number("params.d_L", -1.0), r.number("params.d_R", 1.0));
  } else if (kind == "abs") {
    if (r.has("fold_point"))
      throw ConfigError(
          "fold_point is derived from lambda0 for model \"abs\"; remove it");
    AbsParams p;
    p.nu = r.number("params.nu", p.nu);
    p.r = r.number("params.r", p.r);
    p.J = r.number("params.J", p.J);
    p.m_quarter = r.number("params.m_quarter", p.m_quarter);
    p.F_z = r.number("params.F_z", p.F_z);
    p.theta_r1 = r.number("params.theta_r1", p.theta_r1);
    p.theta_r2 = r.number("params.theta_r2", p.theta_r2);
    p.theta_r3 = r.number("params.theta_r3", p.theta_r3);
    p.k = r.number("params.k", p.k);
    p.lambda0 = r.number("params.lambda0", p.lambda0);
    model = make_abs(p);
  } else if (kind == "poly") {
    detail::check_fold_origin(r);
    PolyTables t;
    t.fL = detail::monomial_table(r.require("poly.L.f"), "poly.L.f");
    t.gL = detail::monomial_table(r.require("poly.L.g"), "poly.L.g");
    t.fR = detail::monomial_table(r.require("poly.R.f"), "poly.R.f");
    t.gR = detail::monomial_table(r.require("poly.R.g"), "poly.R.g");
    model = make_poly("poly", std::move(t));
    if (!r.has("box"))
      throw ConfigError("model \"poly\" requires box = [xmin, xmax, ymin, ymax]");
  } else {
    throw ConfigError("unknown model kind: '" + kind + "'");
  }

  if (r.has("box")) {
    const std::vector<double> b =
        detail::number_list(r.require("box"), "box", 4);
    if (!(b[0] < 0.0 && 0.0 < b[1] && b[2] < 0.0 && 0.0 < b[3]))
      throw ConfigError(
          "box = [xmin, xmax, ymin, ymax] must straddle the origin");
    model.box = {b[0], b[1], b[2], b[3]};
  }

  r.finish();
  return model;
}

inline ModelSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_config(parse_config(ss.str()));
}

// Accepts a builtin name or a path to a model file.
inline ModelSpec resolve_model(const std::string& ref) {
  if (ref == "mass_spring") return make_mass_spring();
  if (ref == "abs") return make_abs();
  return load_model_file(ref);
}

}  // namespace foldcycle
