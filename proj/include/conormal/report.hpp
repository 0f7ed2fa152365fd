// Machine-readable check reports.
//
// The canonical report (report.json, plus per-inequality CSV tables) is a
// deterministic function of (config, seed): runtimes go to a separate
// advisory file so reports stay byte-stable.  Files are written atomically
// via temp-and-rename.

#pragma once

#include "conormal/pipeline.hpp"

namespace conormal {

struct CheckResult {
  std::string id;          // stable identifier, keyed to the verified statement
  std::string status;      // PASS | FAIL | INCONCLUSIVE
  double measured = 0.0;   // headline metric
  double tolerance = 0.0;  // the pinned threshold it is compared against
  std::string detail;
  bool internal_inconsistency = false;  // assembly-identity failure (exit 3)
  double runtime_s = 0.0;               // advisory only
  std::vector<LedgerRow> rows;          // sweep tables for the CSV emitter
};

struct ReportFiles {
  std::string report_json;
  std::string timings_json;
  std::vector<std::string> csv_files;
};

// Writes report.json (+ csv/<inequality>.csv when format includes csv).
// format: "json", "csv" or "both".  Throws on unwritable directories and on
// an empty result set.
ReportFiles emit_report(const std::vector<CheckResult>& results,
                        const std::string& out_dir, const std::string& format,
                        const std::string& suite);

// Exit code contract: 0 all pass, 1 check failure, 3 internal inconsistency
// (2 is reserved for config/schema violations by the caller).
int exit_code_for(const std::vector<CheckResult>& results);

}  // namespace conormal
