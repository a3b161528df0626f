#include "app/artifacts.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "errors.hpp"
#include "io/csv.hpp"

namespace nullfol::app {

using analysis::RunRecord;
using evolution::LedgerRow;
using perturbation::PerturbationRow;

Json jnum(double v) {
  if (std::isfinite(v)) return v;
  return io::format_double(v);
}

double from_jnum(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return io::parse_double(j.get<std::string>());
  throw Error(ErrorCode::IoError, "expected a number in JSON");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  os << text;
  if (!os) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_json(const fs::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::IoError, path.string() + ": " + e.what());
  }
}

namespace {

template <class Row, class Values>
std::vector<std::vector<double>> thin(const std::vector<Row>& rows, int cadence, Values values) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (i % static_cast<std::size_t>(cadence) == 0 || i + 1 == rows.size()) out.push_back(values(rows[i]));
  return out;
}

template <class Row>
std::vector<Row> read_rows(const fs::path& path, const std::vector<std::string>& header,
                           const std::vector<double Row::*>& fields) {
  const auto t = io::read_csv(path);
  if (t.header != header) throw Error(ErrorCode::IoError, path.string() + ": unexpected columns");
  std::vector<Row> rows(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (std::size_t c = 0; c < fields.size(); ++c) rows[i].*fields[c] = io::parse_double(t.rows[i][c]);
  return rows;
}

void put(std::vector<std::vector<std::string>>& kv, const std::string& k, const std::string& v) {
  kv.push_back({k, v});
}
void put(std::vector<std::vector<std::string>>& kv, const std::string& k, double v) {
  kv.push_back({k, io::format_double(v)});
}

void put_budgets(std::vector<std::vector<std::string>>& kv, const std::string& p, const perturbation::Budgets& b) {
  put(kv, p + ".epsilon", b.epsilon);
  put(kv, p + ".delta_o", b.delta_o);
  put(kv, p + ".delta_m", b.delta_m);
  put(kv, p + ".dd_o", b.dd_o);
  put(kv, p + ".dd_m", b.dd_m);
  put(kv, p + ".dd_o_n1", b.dd_o_n1);
}

struct KeyValues {
  std::map<std::string, std::string> m;
  const std::string& at(const std::string& k) const {
    const auto it = m.find(k);
    if (it == m.end()) throw Error(ErrorCode::IoError, "record.csv lacks " + k);
    return it->second;
  }
  double num(const std::string& k) const { return io::parse_double(at(k)); }
  bool flag(const std::string& k) const { return at(k) == "1"; }
  perturbation::Budgets budgets(const std::string& p) const {
    return {num(p + ".epsilon"), num(p + ".delta_o"), num(p + ".delta_m"),
            num(p + ".dd_o"),    num(p + ".dd_m"),    num(p + ".dd_o_n1")};
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const std::vector<double LedgerRow::*> kLedgerFields = {&LedgerRow::s,         &LedgerRow::mean_f,
                                                         &LedgerRow::grad_norm, &LedgerRow::lap_norm,
                                                         &LedgerRow::max_abs_f, &LedgerRow::null_residual,
                                                         &LedgerRow::rhs_sup,   &LedgerRow::step};
const std::vector<double PerturbationRow::*> kPertFields = {
    &PerturbationRow::s,        &PerturbationRow::delta_grad, &PerturbationRow::delta_grad_n1,
    &PerturbationRow::delta_mean, &PerturbationRow::lin_grad, &PerturbationRow::lin_lap,
    &PerturbationRow::lin_mean, &PerturbationRow::err_grad,   &PerturbationRow::err_mean,
    &PerturbationRow::var_diff, &PerturbationRow::dd_F_sup};

}  // namespace

void write_ledger(const fs::path& path, const std::vector<LedgerRow>& rows, int cadence) {
  io::write_csv(path, evolution::ledger_header(), thin(rows, cadence, evolution::ledger_values));
}

std::vector<LedgerRow> read_ledger(const fs::path& path) {
  return read_rows<LedgerRow>(path, evolution::ledger_header(), kLedgerFields);
}

void write_pert_ledger(const fs::path& path, const std::vector<PerturbationRow>& rows, int cadence) {
  io::write_csv(path, perturbation::ledger_header(), thin(rows, cadence, perturbation::ledger_values));
}

std::vector<PerturbationRow> read_pert_ledger(const fs::path& path) {
  return read_rows<PerturbationRow>(path, perturbation::ledger_header(), kPertFields);
}

Json budgets_json(const perturbation::Budgets& b) {
  return Json{{"epsilon", jnum(b.epsilon)}, {"delta_o", jnum(b.delta_o)}, {"delta_m", jnum(b.delta_m)},
              {"dd_o", jnum(b.dd_o)},       {"dd_m", jnum(b.dd_m)},       {"dd_o_n1", jnum(b.dd_o_n1)}};
}

void write_run_record(const fs::path& dir, const RunRecord& rec) {
  fs::create_directories(dir);
  std::vector<std::vector<std::string>> kv;
  put(kv, "index", std::to_string(rec.index));
  put(kv, "profile_seed", std::to_string(rec.profile_seed));
  put(kv, "data_seed", std::to_string(rec.data_seed));
  put(kv, "ok", rec.ok ? "1" : "0");
  put(kv, "error", rec.error);
  std::string st;
  for (std::size_t i = 0; i < rec.statuses.size(); ++i) st += (i ? ";" : "") + rec.statuses[i];
  put(kv, "statuses", st);
  put(kv, "foliations", std::to_string(rec.foliations.size()));
  put_budgets(kv, "budgets", rec.budgets);
  put(kv, "has_pert", rec.pert.empty() ? "0" : "1");
  put(kv, "has_decomposition", rec.has_decomposition ? "1" : "0");
  put_budgets(kv, "shift_budgets", rec.shift_budgets);
  put_budgets(kv, "free_budgets", rec.free_budgets);
  put(kv, "has_partner", rec.has_partner ? "1" : "0");
  put_budgets(kv, "partner_budgets", rec.partner_budgets);
  if (rec.transport_c) put(kv, "transport_c", *rec.transport_c);
  if (rec.transport_commutator) put(kv, "transport_commutator", *rec.transport_commutator);
  if (rec.transport_k) put(kv, "transport_k", *rec.transport_k);
  io::write_csv(dir / "record.csv", io::CsvTable{{"key", "value"}, kv});

  for (std::size_t i = 0; i < rec.foliations.size(); ++i)
    write_ledger(dir / (i == 0 ? std::string("ledger.csv") : "ledger_f" + std::to_string(i + 1) + ".csv"),
                 rec.foliations[i]);
  if (!rec.pert.empty()) write_pert_ledger(dir / "perturbation.csv", rec.pert);
  if (rec.has_decomposition) {
    write_pert_ledger(dir / "perturbation_shift.csv", rec.pert_shift);
    write_pert_ledger(dir / "perturbation_free.csv", rec.pert_free);
  }
  if (rec.has_partner) write_pert_ledger(dir / "perturbation_const.csv", rec.partner);
}

RunRecord load_run_record(const fs::path& dir) {
  const auto t = io::read_csv(dir / "record.csv");
  KeyValues kv;
  for (const auto& r : t.rows) kv.m[r.at(0)] = r.at(1);
  RunRecord rec;
  rec.index = std::stoi(kv.at("index"));
  rec.profile_seed = std::stoull(kv.at("profile_seed"));
  rec.data_seed = std::stoull(kv.at("data_seed"));
  rec.ok = kv.flag("ok");
  rec.error = kv.at("error");
  rec.statuses = split(kv.at("statuses"), ';');
  const int nf = std::stoi(kv.at("foliations"));
  for (int i = 0; i < nf; ++i)
    rec.foliations.push_back(
        read_ledger(dir / (i == 0 ? std::string("ledger.csv") : "ledger_f" + std::to_string(i + 1) + ".csv")));
  rec.budgets = kv.budgets("budgets");
  if (kv.flag("has_pert")) rec.pert = read_pert_ledger(dir / "perturbation.csv");
  rec.has_decomposition = kv.flag("has_decomposition");
  rec.shift_budgets = kv.budgets("shift_budgets");
  rec.free_budgets = kv.budgets("free_budgets");
  if (rec.has_decomposition) {
    rec.pert_shift = read_pert_ledger(dir / "perturbation_shift.csv");
    rec.pert_free = read_pert_ledger(dir / "perturbation_free.csv");
  }
  rec.has_partner = kv.flag("has_partner");
  rec.partner_budgets = kv.budgets("partner_budgets");
  if (rec.has_partner) rec.partner = read_pert_ledger(dir / "perturbation_const.csv");
  if (kv.m.count("transport_c")) rec.transport_c = kv.num("transport_c");
  if (kv.m.count("transport_commutator")) rec.transport_commutator = kv.num("transport_commutator");
  if (kv.m.count("transport_k")) rec.transport_k = kv.num("transport_k");
  return rec;
}

Json certificates_json(const std::vector<analysis::Certificate>& certs, bool incomplete,
                       const std::vector<RunRecord>& runs, const std::vector<std::string>& run_dirs) {
  Json list = Json::array();
  bool all = !incomplete;
  for (const auto& c : certs) {
    Json consts = Json::array();
    for (const auto& k : c.constants)
      consts.push_back(Json{{"name", k.name},
                            {"value", jnum(k.value)},
                            {"ceiling", jnum(k.limit)},
                            {"kind", k.is_floor ? "floor" : "ceiling"},
                            {"pass", k.pass()}});
    list.push_back(Json{{"id", c.id},
                        {"status", analysis::to_string(c.status)},
                        {"samples", c.samples},
                        {"constants", consts},
                        {"note", c.note}});
    all &= c.status == analysis::CertStatus::Pass || c.status == analysis::CertStatus::NotApplicable;
  }
  Json manifest = Json::array();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    Json m{{"index", r.index},
           {"profile_seed", r.profile_seed},
           {"data_seed", r.data_seed},
           {"ok", r.ok},
           {"statuses", r.statuses},
           {"budgets", budgets_json(r.budgets)}};
    if (!r.error.empty()) m["error"] = r.error;
    if (i < run_dirs.size()) m["dir"] = run_dirs[i];
    manifest.push_back(m);
  }
  return Json{{"all_pass", all}, {"incomplete", incomplete}, {"certificates", list}, {"runs", manifest}};
}

std::string certificates_table(const std::vector<analysis::Certificate>& certs) {
  std::ostringstream os;
  os << std::left << std::setw(26) << "certificate" << std::setw(14) << "status" << std::setw(16) << "constant"
     << std::setw(14) << "value" << std::setw(12) << "limit"
     << "ok\n";
  for (const auto& c : certs) {
    if (c.constants.empty())
      os << std::setw(26) << c.id << std::setw(14) << analysis::to_string(c.status) << "\n";
    for (std::size_t i = 0; i < c.constants.size(); ++i) {
      const auto& k = c.constants[i];
      os << std::setw(26) << (i == 0 ? c.id : "") << std::setw(14) << (i == 0 ? analysis::to_string(c.status) : "")
         << std::setw(16) << k.name << std::setw(14) << io::format_double(k.value) << std::setw(12)
         << ((k.is_floor ? ">= " : "<= ") + io::format_double(k.limit)) << (k.pass() ? "yes" : "NO") << "\n";
    }
  }
  return os.str();
}

}  // namespace nullfol::app
