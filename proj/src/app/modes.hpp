#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "app/run_config.hpp"

namespace nullfol::app {

enum ExitCode { kSuccess = 0, kUsage = 1, kDomainExit = 2, kCheckFailed = 3 };

// Executes the configured mode and writes the run directory rc.output.dir.
// Progress lines go to log. Config and I/O problems throw Error.
int run_mode(const RunConfig& rc, std::ostream& log);

struct SweepAxis {
  std::string key;
  std::vector<double> values;
};
// "k=a:step:b" (inclusive, empty when a > b), "k=v" or "k=v1,v2,..."
SweepAxis parse_axis(const std::string& spec);

struct SweepResult {
  int points = 0;
  int cells = 0;     // distinct cells after deduplication
  int executed = 0;  // cells computed in this invocation
  bool all_pass = true;
};
SweepResult run_sweep(const RunConfig& rc, std::ostream& log);

// FNV-1a of the text, as 16 hex digits
std::string content_hash(const std::string& text);

}  // namespace nullfol::app
