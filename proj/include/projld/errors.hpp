#pragma once

#include <stdexcept>
#include <string>

namespace projld {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite or out-of-domain argument.
class DomainError : public Error {
public:
    using Error::Error;
};

// Caller broke a documented precondition.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// An evaluation callback produced NaN or otherwise unusable output.
class OracleError : public Error {
public:
    using Error::Error;
};

// Quadrature failed to stabilise under node doubling.
class AccuracyError : public Error {
public:
    AccuracyError(const std::string& what, double coarse, double fine, int nodes)
        : Error(what), coarse_(coarse), fine_(fine), nodes_(nodes) {}

    [[nodiscard]] double coarse() const noexcept { return coarse_; }
    [[nodiscard]] double fine() const noexcept { return fine_; }
    [[nodiscard]] int nodes() const noexcept { return nodes_; }

private:
    double coarse_;
    double fine_;
    int nodes_;
};

// Threshold lies outside the range the tilted mean can reach.
class InfeasibleThreshold : public Error {
public:
    InfeasibleThreshold(const std::string& what, double threshold)
        : Error(what), threshold_(threshold) {}
    [[nodiscard]] double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

// Rejection sampler acceptance rate fell below the usable floor.
class EnvelopeError : public Error {
public:
    EnvelopeError(const std::string& what, double tilt, double acceptance)
        : Error(what), tilt_(tilt), acceptance_(acceptance) {}
    [[nodiscard]] double tilt() const noexcept { return tilt_; }
    [[nodiscard]] double acceptance() const noexcept { return acceptance_; }

private:
    double tilt_;
    double acceptance_;
};

// A rate-function ordering predicted by the curvature class did not hold.
class VerdictViolation : public Error {
public:
    VerdictViolation(const std::string& what, double witness)
        : Error(what), witness_(witness) {}
    [[nodiscard]] double witness() const noexcept { return witness_; }

private:
    double witness_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace projld
