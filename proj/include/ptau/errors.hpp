#pragma once

#include <stdexcept>
#include <string>

namespace ptau {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or options.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Gamma (or a Pochhammer-type denominator) evaluated at a pole.
class PoleError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class DivisionByZero : public Error {
public:
    using Error::Error;
};

/// A recurrence step hit a zero (or negligible) divisor.
class SingularStep : public Error {
public:
    SingularStep(const std::string& what, long n) : Error(what + " at n=" + std::to_string(n)), n_(n) {}
    long index() const { return n_; }

private:
    long n_;
};

class TruncationNotConverged : public Error {
public:
    using Error::Error;
};

class ZeroLowerPochhammer : public Error {
public:
    using Error::Error;
};

class EscalationExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace ptau
