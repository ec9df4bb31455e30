#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levlab {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Relative threshold under which a sample counts as zero when checking supports.
inline constexpr double kSupportTolerance = 1e-8;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed input representation (non-monotone table, wrong sizes, NaNs).
class RepresentationError : public Error {
public:
    using Error::Error;
};

class SupportError : public Error {
public:
    using Error::Error;
};

class SymmetryError : public Error {
public:
    using Error::Error;
};

/// A named certificate failed. what() names it; value carries the offending number.
class CertificationError : public Error {
public:
    CertificationError(std::string certificate, const std::string& detail, double value = 0.0)
        : Error(certificate + ": " + detail), certificate_(std::move(certificate)), value_(value) {}
    const std::string& certificate() const noexcept { return certificate_; }
    double value() const noexcept { return value_; }

private:
    std::string certificate_;
    double value_;
};

class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, double achieved) : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Spectral data did not decay at the end of its grid.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, double tail) : Error(what), tail_(tail) {}
    double tail() const noexcept { return tail_; }

private:
    double tail_;
};

class LevelTooCoarseError : public Error {
public:
    LevelTooCoarseError(const std::string& what, int minimal_level)
        : Error(what), minimal_level_(minimal_level) {}
    int minimal_level() const noexcept { return minimal_level_; }

private:
    int minimal_level_;
};

class KernelContractError : public Error {
public:
    using Error::Error;
};

/// The weighted integrability hypothesis fails (non-finite weighted mass).
class HypothesisViolation : public Error {
public:
    using Error::Error;
};

/// A verdict gate refused to run (e.g. witness requested for a divergent weight).
class PreconditionError : public Error {
public:
    using Error::Error;
};

} // namespace levlab
