#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace atsmc {

/// One analysis result: a scenario evaluated at one time point by one method.
struct ReportRow {
  std::string scenario;
  double time_s = 0.0;
  std::string method;  // "smc" or "oracle"
  double probability = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t runs = 0;    // 0 for oracle rows
  std::uint64_t seed = 0;   // 0 for oracle rows
};

// CSV with header scenario,time_s,method,probability,ci_low,ci_high,runs,seed.
// Numbers are printed as exact shortest decimals, so equal inputs give
// byte-identical output.
std::string to_csv(const std::vector<ReportRow>& rows);

}  // namespace atsmc
