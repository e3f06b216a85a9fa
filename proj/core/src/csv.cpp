#include "acbandit/csv.hpp"

#include <cstdio>
#include <cstdlib>

namespace acb {

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return buf;
}

double csv_round(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace acb
