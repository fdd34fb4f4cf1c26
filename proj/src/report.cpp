#include "atsmc/report.hpp"

#include "atsmc/parser.hpp"

namespace atsmc {

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "scenario,time_s,method,probability,ci_low,ci_high,runs,seed\n";
  for (const ReportRow& r : rows) {
    out += r.scenario;
    out += ',';
    out += format_rate(r.time_s);
    out += ',';
    out += r.method;
    out += ',';
    out += format_rate(r.probability);
    out += ',';
    out += format_rate(r.ci_low);
    out += ',';
    out += format_rate(r.ci_high);
    out += ',';
    out += std::to_string(r.runs);
    out += ',';
    out += std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

}  // namespace atsmc
