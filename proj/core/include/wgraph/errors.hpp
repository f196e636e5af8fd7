#pragma once

#include <stdexcept>
#include <string>

namespace wg {

// Base for every failure the library reports. Callers that only want to know
// "did the computation fail" catch this; the subclasses say why.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input: out-of-range parameters, malformed configs, broken invariants.
class DomainError : public Error {
public:
    using Error::Error;
};

// A root search found a count inconsistent with the Sturm ordering.
class BracketError : public Error {
public:
    using Error::Error;
};

// Evaluation point too close to the spectrum (or a removable singularity of a
// formula that is not handled analytically).
class NearSpectrumError : public Error {
public:
    using Error::Error;
};

// Square-root branch with Im k <= 0 where decay is required.
class BranchError : public Error {
public:
    using Error::Error;
};

// Linear or ODE solver did not reach its tolerance.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace wg
