#pragma once

#include <stdexcept>
#include <string>

namespace gapm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, bad probabilities, schema violations.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The LP kernel could not produce a trustworthy answer.
class SolverFailure : public Error {
public:
    using Error::Error;
};

/// A second-stage problem was infeasible or unbounded at some realization.
class RecourseViolation : public Error {
public:
    using Error::Error;
};

/// A caller broke an operation's precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

}  // namespace gapm
