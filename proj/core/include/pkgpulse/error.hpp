#pragma once

#include <stdexcept>
#include <string>

namespace pkgpulse {

/// A package was queried in a snapshot that does not contain it.
class AbsentPackageError : public std::out_of_range {
 public:
  explicit AbsentPackageError(const std::string& package)
      : std::out_of_range("package not present in snapshot: " + package), package_(package) {}
  const std::string& package() const noexcept { return package_; }

 private:
  std::string package_;
};

/// A distribution index or time window falls outside the corpus.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Correlation of a constant list.
class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class UntrainedModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InsufficientHistory : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace pkgpulse
