#pragma once

#include <stdexcept>
#include <string>

namespace acb {

/// Invalid experiment configuration (bad key, out-of-range parameter,
/// dimension mismatch between configured pieces).
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed observations fed to an estimator (non-finite values, empty
/// input where data is required).
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// A downstream statistical computation cannot proceed (singular design,
/// too few bootstrap replicates, ...).
class inference_error : public std::runtime_error {
 public:
  explicit inference_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace acb
