#ifndef ARGMIN_ERRORS_HPP
#define ARGMIN_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace argmin {

// Typed failures share one base so callers can branch on kind() or catch the
// concrete class.  what() always starts with the kind name.
class EstimationError : public std::runtime_error {
public:
  EstimationError(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

private:
  std::string kind_;
};

// Objective value is NaN or infinite at the starting point.
class NonFiniteObjective : public EstimationError {
public:
  explicit NonFiniteObjective(const std::string& msg)
      : EstimationError("NonFiniteObjective", msg) {}
};

// Objective verified non-increasing out to the norm cap: no finite argmin
// (logistic separation, all-censored hazard fits, constant coupling paths).
class MonotoneObjective : public EstimationError {
public:
  MonotoneObjective(const std::string& msg, std::vector<double> dir)
      : EstimationError("MonotoneObjective", msg), direction(std::move(dir)) {}
  std::vector<double> direction;  // unit vector of verified descent
};

// Nonsmooth solve finished its homotopy but the subgradient certificate
// does not meet the requested tolerance.
class NoCertificate : public EstimationError {
public:
  explicit NoCertificate(const std::string& msg)
      : EstimationError("NoCertificate", msg) {}
};

class EmptyGrid : public EstimationError {
public:
  explicit EmptyGrid(const std::string& msg) : EstimationError("EmptyGrid", msg) {}
};

class EmptyData : public EstimationError {
public:
  explicit EmptyData(const std::string& msg) : EstimationError("EmptyData", msg) {}
};

class RankDeficient : public EstimationError {
public:
  explicit RankDeficient(const std::string& msg)
      : EstimationError("RankDeficient", msg) {}
};

class NoEvents : public EstimationError {
public:
  explicit NoEvents(const std::string& msg) : EstimationError("NoEvents", msg) {}
};

class DegenerateData : public EstimationError {
public:
  explicit DegenerateData(const std::string& msg)
      : EstimationError("DegenerateData", msg) {}
};

class PathTooShort : public EstimationError {
public:
  explicit PathTooShort(const std::string& msg)
      : EstimationError("PathTooShort", msg) {}
};

class QuadratureFailure : public EstimationError {
public:
  explicit QuadratureFailure(const std::string& msg)
      : EstimationError("QuadratureFailure", msg) {}
};

class AllZeroWeights : public EstimationError {
public:
  explicit AllZeroWeights(const std::string& msg)
      : EstimationError("AllZeroWeights", msg) {}
};

class DegenerateVariance : public EstimationError {
public:
  explicit DegenerateVariance(const std::string& msg)
      : EstimationError("DegenerateVariance", msg) {}
};

class SingularInformation : public EstimationError {
public:
  explicit SingularInformation(const std::string& msg)
      : EstimationError("SingularInformation", msg) {}
};

class EmptyRiskSet : public EstimationError {
public:
  explicit EmptyRiskSet(const std::string& msg)
      : EstimationError("EmptyRiskSet", msg) {}
};

class NonUniqueMinimizer : public EstimationError {
public:
  explicit NonUniqueMinimizer(const std::string& msg)
      : EstimationError("NonUniqueMinimizer", msg) {}
};

// More than the allowed fraction of Monte Carlo replications failed.
class TooManyFailures : public EstimationError {
public:
  explicit TooManyFailures(const std::string& msg)
      : EstimationError("TooManyFailures", msg) {}
};

// Malformed input: config schema, unknown menu entry, bad delimited text.
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg)
      : std::runtime_error("DataError: " + msg) {}
};

}  // namespace argmin

#endif
