#include "gctl/report.hpp"

#include "gctl/grid.hpp"

#include <ostream>

namespace gctl {

void write_report(std::ostream& os, const std::vector<ReportRow>& rows) {
  os << "check,parameter,value,bound,passed\n";
  for (const auto& r : rows) {
    os << r.check << ',' << r.parameter << ',' << format_double(r.value) << ','
       << format_double(r.bound) << ',' << (r.passed ? "true" : "false") << '\n';
  }
}

void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "nx,nt,probe_value,error,rate\n";
  for (const auto& r : rows) {
    os << r.nx << ',' << r.nt << ',' << format_double(r.probe_value) << ','
       << format_double(r.error) << ',' << format_double(r.rate) << '\n';
  }
}

}  // namespace gctl
