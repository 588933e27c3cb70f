#pragma once

#include <stdexcept>
#include <string>

namespace chemolab {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define CHEMOLAB_DEFINE_ERROR(Name)              \
    class Name : public Error {                  \
    public:                                      \
        using Error::Error;                      \
    }

CHEMOLAB_DEFINE_ERROR(HorizonTooCoarse);
CHEMOLAB_DEFINE_ERROR(HorizonTooShort);
CHEMOLAB_DEFINE_ERROR(InvalidArgument);
CHEMOLAB_DEFINE_ERROR(NonFiniteInput);
CHEMOLAB_DEFINE_ERROR(NotSpatiallyHomogeneous);
CHEMOLAB_DEFINE_ERROR(NotPeriodicCoefficients);
CHEMOLAB_DEFINE_ERROR(NotAutonomousCoefficients);
CHEMOLAB_DEFINE_ERROR(DegenerateDenominator);
CHEMOLAB_DEFINE_ERROR(DenominatorNotPositive);
CHEMOLAB_DEFINE_ERROR(StepRejected);
CHEMOLAB_DEFINE_ERROR(InvalidInitial);
CHEMOLAB_DEFINE_ERROR(OrderViolation);
CHEMOLAB_DEFINE_ERROR(HypothesisViolated);
CHEMOLAB_DEFINE_ERROR(MissingBlock);

#undef CHEMOLAB_DEFINE_ERROR

/// Iterative construction did not meet its stopping criterion.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A trajectory inside a construction blew up (sup norm crossed the threshold).
class BlowUpError : public Error {
public:
    BlowUpError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

/// A trajectory inside a construction ended in StepFailure.
class StepFailureError : public Error {
public:
    StepFailureError(const std::string& what, double t) : Error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    ValidationError(std::string key, const std::string& reason)
        : Error(key + ": " + reason), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace chemolab
