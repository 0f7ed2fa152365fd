#include "conormal/report.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace conormal {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void atomic_write(const fs::path& target, const std::string& payload) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << payload;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  // Shortest representation that round-trips; keeps reports byte-stable.
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double back = std::strtod(buf, nullptr);
  for (int prec = 1; prec <= 16; ++prec) {
    char probe[64];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == back) return probe;
  }
  return buf;
}

}  // namespace

ReportFiles emit_report(const std::vector<CheckResult>& results,
                        const std::string& out_dir, const std::string& format,
                        const std::string& suite) {
  if (results.empty())
    throw std::invalid_argument("emit_report: empty result set");
  if (format != "json" && format != "csv" && format != "both")
    throw std::invalid_argument("emit_report: format must be json|csv|both");

  fs::create_directories(out_dir);
  ReportFiles files;

  const bool want_json = format != "csv";
  const bool want_csv = format != "json";

  if (want_json) {
    ordered_json checks = ordered_json::array();
    bool any_fail = false;
    for (const auto& r : results) {
      ordered_json c;
      c["id"] = r.id;
      c["status"] = r.status;
      c["measured"] = r.measured;
      c["tolerance"] = r.tolerance;
      c["detail"] = r.detail;
      checks.push_back(std::move(c));
      if (r.status == "FAIL") any_fail = true;
    }
    ordered_json root;
    root["suite"] = suite;
    root["overall"] = any_fail ? "FAIL" : "PASS";
    root["checks"] = std::move(checks);
    const fs::path p = fs::path(out_dir) / "report.json";
    atomic_write(p, root.dump(2) + "\n");
    files.report_json = p.string();

    ordered_json times;
    for (const auto& r : results) times[r.id] = r.runtime_s;
    const fs::path tp = fs::path(out_dir) / "timings.json";
    atomic_write(tp, times.dump(2) + "\n");
    files.timings_json = tp.string();
  }

  if (want_csv) {
    // One CSV per inequality id, rows in deterministic emission order.
    fs::path csvdir = fs::path(out_dir) / "csv";
    fs::create_directories(csvdir);
    std::map<std::string, std::string> tables;
    for (const auto& r : results)
      for (const auto& row : r.rows) {
        auto& body = tables[row.inequality];
        if (body.empty()) body = "sample_id,gamma,lhs,rhs,ratio\n";
        body += std::to_string(row.sample) + "," + format_double(row.gamma) +
                "," + format_double(row.lhs) + "," + format_double(row.rhs) +
                "," + format_double(row.ratio()) + "\n";
      }
    for (auto& [name, body] : tables) {
      const fs::path p = csvdir / (name + ".csv");
      atomic_write(p, body);
      files.csv_files.push_back(p.string());
    }
  }
  return files;
}

int exit_code_for(const std::vector<CheckResult>& results) {
  bool fail = false;
  for (const auto& r : results) {
    if (r.internal_inconsistency && r.status == "FAIL") return 3;
    if (r.status == "FAIL") fail = true;
  }
  return fail ? 1 : 0;
}

}  // namespace conormal
