#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gctl {

/// One line of `report.csv`: check,parameter,value,bound,passed.
struct ReportRow {
  std::string check;
  std::string parameter;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

void write_report(std::ostream& os, const std::vector<ReportRow>& rows);

/// One line of `convergence.csv`: nx,nt,probe_value,error,rate.
struct ConvergenceRow {
  int nx = 0;
  int nt = 0;
  double probe_value = 0.0;
  double error = 0.0;
  double rate = 0.0;  // nan on the first row
};

void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows);

}  // namespace gctl
