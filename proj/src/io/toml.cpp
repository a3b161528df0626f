#include "io/toml.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"
#include "io/csv.hpp"

namespace nullfol::io {

namespace {

[[noreturn]] void fail(int line, const std::string& what) {
  throw Error(ErrorCode::ConfigError, "config line " + std::to_string(line) + ": " + what);
}

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line = 1;

  void skip_ws(bool newlines) {
    while (i < s.size()) {
      const char c = s[i];
      if (c == ' ' || c == '\t' || c == '\r') {
        ++i;
      } else if (c == '\n' && newlines) {
        ++i;
        ++line;
      } else if (c == '#' && newlines) {
        while (i < s.size() && s[i] != '\n') ++i;
      } else {
        break;
      }
    }
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return i < s.size() ? s[i] : '\0'; }
};

std::string parse_key(Cursor& c) {
  std::string k;
  while (!c.done()) {
    const char ch = c.peek();
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.') {
      k += ch;
      ++c.i;
    } else {
      break;
    }
  }
  if (k.empty()) fail(c.line, "expected a key");
  return k;
}

std::string parse_string(Cursor& c) {
  const char q = c.s[c.i++];
  std::string out;
  while (!c.done() && c.peek() != q) {
    char ch = c.s[c.i++];
    if (ch == '\n') fail(c.line, "newline in string");
    if (q == '"' && ch == '\\') {
      if (c.done()) fail(c.line, "dangling escape");
      const char e = c.s[c.i++];
      switch (e) {
        case 'n': ch = '\n'; break;
        case 't': ch = '\t'; break;
        case '"': ch = '"'; break;
        case '\\': ch = '\\'; break;
        default: fail(c.line, std::string("unsupported escape \\") + e);
      }
    }
    out += ch;
  }
  if (c.done()) fail(c.line, "unterminated string");
  ++c.i;
  return out;
}

TomlValue parse_value(Cursor& c) {
  const char ch = c.peek();
  if (ch == '"' || ch == '\'') return {parse_string(c)};
  if (ch == '[') {
    ++c.i;
    TomlArray arr;
    c.skip_ws(true);
    while (c.peek() != ']') {
      arr.push_back(parse_value(c));
      c.skip_ws(true);
      if (c.peek() == ',') {
        ++c.i;
        c.skip_ws(true);
      } else if (c.peek() != ']') {
        fail(c.line, "expected ',' or ']' in array");
      }
    }
    ++c.i;
    return {arr};
  }
  std::string tok;
  while (!c.done()) {
    const char t = c.peek();
    if (t == ',' || t == ']' || t == '#' || std::isspace(static_cast<unsigned char>(t))) break;
    tok += t;
    ++c.i;
  }
  if (tok == "true") return {true};
  if (tok == "false") return {false};
  std::string num;
  for (char t : tok)
    if (t != '_') num += t;
  if (num == "inf" || num == "+inf") return {INFINITY};
  if (num == "-inf") return {-INFINITY};
  if (num == "nan" || num == "+nan" || num == "-nan") return {std::nan("")};
  if (num.empty()) fail(c.line, "expected a value");
  const bool is_float = num.find_first_of(".eE") != std::string::npos;
  try {
    if (!is_float) {
      std::size_t pos = 0;
      const long long v = std::stoll(num, &pos);
      if (pos != num.size()) throw std::invalid_argument(num);
      return {static_cast<std::int64_t>(v)};
    }
    return {parse_double(num[0] == '+' ? num.substr(1) : num)};
  } catch (const std::exception&) {
    fail(c.line, "bad value '" + tok + "'");
  }
}

double as_double(const TomlValue& v, const std::string& key) {
  if (const auto* d = std::get_if<double>(&v.v)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&v.v)) return static_cast<double>(*i);
  throw Error(ErrorCode::ConfigError, key + " must be a number");
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config cfg;
  Cursor c{text};
  std::string table;
  while (true) {
    c.skip_ws(true);
    if (c.done()) break;
    if (c.peek() == '[') {
      ++c.i;
      c.skip_ws(false);
      table = parse_key(c);
      c.skip_ws(false);
      if (c.peek() != ']') fail(c.line, "expected ']' after table name");
      ++c.i;
    } else {
      const std::string key = parse_key(c);
      c.skip_ws(false);
      if (c.peek() != '=') fail(c.line, "expected '=' after " + key);
      ++c.i;
      c.skip_ws(false);
      const std::string full = table.empty() ? key : table + "." + key;
      if (cfg.has(full)) fail(c.line, "duplicate key " + full);
      cfg.values_[full] = parse_value(c);
    }
    c.skip_ws(false);
    if (c.peek() == '#')
      while (!c.done() && c.peek() != '\n') ++c.i;
    if (!c.done() && c.peek() != '\n') fail(c.line, "trailing characters");
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string toml_format(const TomlValue& v) {
  struct V {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      std::string s = format_double(d);
      if (std::isfinite(d) && s.find_first_of(".eE") == std::string::npos) s += ".0";
      return s;
    }
    std::string operator()(const std::string& s) const {
      std::string o = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') o += '\\';
        if (c == '\n') {
          o += "\\n";
          continue;
        }
        o += c;
      }
      return o + "\"";
    }
    std::string operator()(const TomlArray& a) const {
      std::string o = "[";
      for (std::size_t i = 0; i < a.size(); ++i) o += (i ? ", " : "") + toml_format(a[i]);
      return o + "]";
    }
  };
  return std::visit(V{}, v.v);
}

std::string Config::to_toml() const {
  std::map<std::string, std::vector<std::pair<std::string, const TomlValue*>>> tables;
  for (const auto& [k, v] : values_) {
    const auto dot = k.rfind('.');
    if (dot == std::string::npos)
      tables[""].push_back({k, &v});
    else
      tables[k.substr(0, dot)].push_back({k.substr(dot + 1), &v});
  }
  std::ostringstream os;
  bool first = true;
  for (const auto& [t, entries] : tables) {
    if (!t.empty()) os << (first ? "" : "\n") << "[" << t << "]\n";
    for (const auto& [k, v] : entries) os << k << " = " << toml_format(*v) << "\n";
    first = false;
  }
  return os.str();
}

void Config::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  os << to_toml();
}

void Config::set_from_string(const std::string& key, const std::string& value) {
  try {
    Cursor c{value};
    c.skip_ws(false);
    TomlValue v = parse_value(c);
    c.skip_ws(false);
    if (c.done()) {
      values_[key] = std::move(v);
      return;
    }
  } catch (const Error&) {
  }
  values_[key] = TomlValue{value};
}

const TomlValue* Config::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto* v = find(key);
  return v ? as_double(*v, key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&v->v)) return *i;
  throw Error(ErrorCode::ConfigError, key + " must be an integer");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (const auto* b = std::get_if<bool>(&v->v)) return *b;
  throw Error(ErrorCode::ConfigError, key + " must be true or false");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = find(key);
  if (!v) return fallback;
  if (const auto* s = std::get_if<std::string>(&v->v)) return *s;
  throw Error(ErrorCode::ConfigError, key + " must be a string");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  const auto* v = find(key);
  if (!v) return {};
  const auto* a = std::get_if<TomlArray>(&v->v);
  if (!a) return {as_double(*v, key)};
  std::vector<double> out;
  for (const auto& e : *a) out.push_back(as_double(e, key));
  return out;
}

std::vector<std::vector<double>> Config::get_matrix(const std::string& key) const {
  const auto* v = find(key);
  if (!v) return {};
  const auto* a = std::get_if<TomlArray>(&v->v);
  if (!a) throw Error(ErrorCode::ConfigError, key + " must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : *a) {
    const auto* r = std::get_if<TomlArray>(&row.v);
    if (!r) throw Error(ErrorCode::ConfigError, key + " must be an array of arrays");
    std::vector<double> vals;
    for (const auto& e : *r) vals.push_back(as_double(e, key));
    out.push_back(std::move(vals));
  }
  return out;
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> k;
  for (const auto& [key, v] : values_) k.push_back(key);
  return k;
}

}  // namespace nullfol::io
