#pragma once

#include <string>

namespace acb {

/// Format with 9 significant digits, '.' decimal separator ("%.9g").
std::string fmt9(double x);

/// Round through the 9-significant-digit CSV representation, so values
/// aggregated in memory match values re-read from disk exactly.
double csv_round(double x);

}  // namespace acb
