#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nullfol::io {

// shortest decimal that reads back to the same double; "nan", "inf", "-inf" otherwise
std::string format_double(double v);
double parse_double(const std::string& s);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> numeric_column(const std::string& name) const;
};

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace nullfol::io
