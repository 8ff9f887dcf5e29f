#pragma once

#include <stdexcept>
#include <string>

namespace gradcode {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent arguments (wrong arity, out-of-range index, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// The requested (d, s, m) triple violates d >= s + m at k = n.
class AchievabilityError : public Error {
public:
    using Error::Error;
};

/// Scheme construction failed (repeated evaluation points, singular draws, ...).
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// A decode-side linear system is too ill-conditioned to trust.
class ConditioningError : public Error {
public:
    ConditioningError(const std::string &what, double condition_number)
        : Error(what), condition_number_(condition_number) {}
    double condition_number() const { return condition_number_; }

private:
    double condition_number_;
};

/// A numerical routine failed to reach its target accuracy.
class NumericalError : public Error {
public:
    NumericalError(const std::string &what, double achieved_tolerance)
        : Error(what), achieved_tolerance_(achieved_tolerance) {}
    double achieved_tolerance() const { return achieved_tolerance_; }

private:
    double achieved_tolerance_;
};

/// The master did not collect enough worker responses in time.
class TimeoutError : public Error {
public:
    using Error::Error;
};

/// Malformed wire frame or handshake.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// File or socket I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace gradcode
