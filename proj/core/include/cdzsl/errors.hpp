#pragma once

#include <stdexcept>
#include <string>

namespace cdzsl {

class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Shape of an input does not match what the operation requires.
class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Anything wrong with data on disk: bad files, bad values, bad cross-checks.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

class BadMagic : public DataError {
public:
    explicit BadMagic(const std::string& msg) : DataError(msg) {}
};

class TruncatedPayload : public DataError {
public:
    explicit TruncatedPayload(const std::string& msg) : DataError(msg) {}
};

class DimensionOverflow : public DataError {
public:
    explicit DimensionOverflow(const std::string& msg) : DataError(msg) {}
};

class NonFiniteValue : public DataError {
public:
    explicit NonFiniteValue(const std::string& msg) : DataError(msg) {}
};

// Dictionary gradient step kept increasing the objective after the maximum
// number of step halvings.
class StepDivergence : public Error {
public:
    explicit StepDivergence(const std::string& msg) : Error(msg) {}
};

class SingularSystem : public Error {
public:
    explicit SingularSystem(const std::string& msg) : Error(msg) {}
};

class RejectionBudgetExceeded : public Error {
public:
    explicit RejectionBudgetExceeded(const std::string& msg) : Error(msg) {}
};

// pac_sample_bound: no sample count up to the search cap satisfies the bound.
class Infeasible : public Error {
public:
    explicit Infeasible(const std::string& msg) : Error(msg) {}
};

}  // namespace cdzsl
