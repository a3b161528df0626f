#include "io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "errors.hpp"

namespace nullfol::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorCode::IoError, "not a number: '" + s + "'");
  return v;
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int c = column(name);
  if (c < 0) throw Error(ErrorCode::IoError, "missing CSV column " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(parse_double(r.at(c)));
  return out;
}

namespace {

std::string quote(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void write_line(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << quote(fields[i]);
  os << "\r\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return os;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto os = open_out(path);
  write_line(os, header);
  std::vector<std::string> f;
  for (const auto& r : rows) {
    f.clear();
    for (double v : r) f.push_back(format_double(v));
    write_line(os, f);
  }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  auto os = open_out(path);
  write_line(os, table.header);
  for (const auto& r : table.rows) write_line(os, r);
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  const std::string text = ss.str();
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> rec;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      rec.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        rec.push_back(std::move(field));
        records.push_back(std::move(rec));
      }
      rec.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw Error(ErrorCode::IoError, "unterminated quote in " + path.string());
  if (any || !field.empty()) {
    rec.push_back(std::move(field));
    records.push_back(std::move(rec));
  }
  CsvTable t;
  if (records.empty()) return t;
  t.header = std::move(records[0]);
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != t.header.size())
      throw Error(ErrorCode::IoError, path.string() + ": row " + std::to_string(i) + " has the wrong field count");
    t.rows.push_back(std::move(records[i]));
  }
  return t;
}

}  // namespace nullfol::io
