#pragma once

#include <stdexcept>
#include <string>

namespace stripemb {

// Invalid argument outside the mathematical domain of an operation
// (p <= 1, empty interval, t outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DimensionCapError : public DomainError {
public:
    using DomainError::DomainError;
};

class ZeroFunctionError : public DomainError {
public:
    using DomainError::DomainError;
};

// An iterative or adaptive numerical method ran out of budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// A numerical certificate or refutation could not be established.
class CertificationError : public std::runtime_error {
public:
    CertificationError(const std::string& what, std::string check, double deviation)
        : std::runtime_error(what), check_(std::move(check)), deviation_(deviation) {}

    [[nodiscard]] const std::string& check() const noexcept { return check_; }
    [[nodiscard]] double deviation() const noexcept { return deviation_; }

private:
    std::string check_;
    double deviation_;
};

}  // namespace stripemb
