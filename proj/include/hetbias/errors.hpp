#pragma once

#include <stdexcept>
#include <string>

namespace hetbias {

// Base class for all library errors. Subclasses map to CLI exit codes:
// input/shape problems exit 2 or 3 depending on origin (flag vs data),
// numeric failures exit 4.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent caller input.
class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

class TooShort : public InvalidInput {
 public:
  explicit TooShort(const std::string& msg) : InvalidInput(msg) {}
};

class ConstantRegressor : public InvalidInput {
 public:
  explicit ConstantRegressor(const std::string& msg) : InvalidInput(msg) {}
};

class IncompatibleShape : public InvalidInput {
 public:
  explicit IncompatibleShape(const std::string& msg) : InvalidInput(msg) {}
};

class LengthMismatch : public InvalidInput {
 public:
  explicit LengthMismatch(const std::string& msg) : InvalidInput(msg) {}
};

class IndexOutOfRange : public InvalidInput {
 public:
  explicit IndexOutOfRange(const std::string& msg) : InvalidInput(msg) {}
};

class InfeasibleTarget : public InvalidInput {
 public:
  explicit InfeasibleTarget(const std::string& msg) : InvalidInput(msg) {}
};

class DegenerateSampleSize : public InvalidInput {
 public:
  explicit DegenerateSampleSize(const std::string& msg) : InvalidInput(msg) {}
};

class RankDeficient : public InvalidInput {
 public:
  explicit RankDeficient(const std::string& msg) : InvalidInput(msg) {}
};

// A numeric routine could not produce a trustworthy result.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Moment-matching search exhausted its iteration budget.
class MomentMatchFailed : public NumericError {
 public:
  explicit MomentMatchFailed(const std::string& msg) : NumericError(msg) {}
};

// Root bracketing or refinement failed inside a solver.
class NoBracket : public NumericError {
 public:
  explicit NoBracket(const std::string& msg) : NumericError(msg) {}
};

}  // namespace hetbias
