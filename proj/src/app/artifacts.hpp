#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis/certify.hpp"

namespace nullfol::app {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

// finite doubles as numbers, the rest as "inf" / "-inf" / "nan"
Json jnum(double v);
double from_jnum(const Json& j);
void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);
std::string read_text(const fs::path& path);

void write_ledger(const fs::path& path, const std::vector<evolution::LedgerRow>& rows, int cadence = 1);
std::vector<evolution::LedgerRow> read_ledger(const fs::path& path);
void write_pert_ledger(const fs::path& path, const std::vector<perturbation::PerturbationRow>& rows,
                       int cadence = 1);
std::vector<perturbation::PerturbationRow> read_pert_ledger(const fs::path& path);

Json budgets_json(const perturbation::Budgets& b);

// Everything aggregate() reads, as CSV files in dir: ledger.csv (f1), ledger_f2.csv,
// perturbation*.csv and record.csv for the scalars. Reloading is exact.
void write_run_record(const fs::path& dir, const analysis::RunRecord& rec);
analysis::RunRecord load_run_record(const fs::path& dir);

Json certificates_json(const std::vector<analysis::Certificate>& certs, bool incomplete,
                       const std::vector<analysis::RunRecord>& runs, const std::vector<std::string>& run_dirs);
std::string certificates_table(const std::vector<analysis::Certificate>& certs);

}  // namespace nullfol::app
