#pragma once

#include <stdexcept>
#include <string>

namespace ermakov {

/// Bad input: a precondition of the called operation does not hold.
class ValidationError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Failure during a numerical computation. `module()` names the library
/// module that raised it, so front ends can emit tagged diagnostics.
class NumericError : public std::runtime_error
{
public:
    NumericError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module))
    {
    }

    const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Evaluation point outside the span of tabulated data.
class RangeError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// Argument outside the mathematical domain of a formula (zero modulus, v0 = 0, ...).
class DomainError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

/// Integrator could not meet its tolerance; carries the last accepted time.
class StepFailure : public NumericError
{
public:
    StepFailure(const std::string& module, double last_good_t, const std::string& what)
        : NumericError(module, what + " (last good t = " + std::to_string(last_good_t) + ")"),
          last_good_t_(last_good_t)
    {
    }

    double last_good_t() const noexcept { return last_good_t_; }

private:
    double last_good_t_;
};

/// |Y| of the direct Riccati integration exceeded the blow-up threshold.
class BlowUpError : public NumericError
{
public:
    BlowUpError(double t, const std::string& what)
        : NumericError("width_dynamics", what + " at t = " + std::to_string(t)), t_(t)
    {
    }

    double time() const noexcept { return t_; }

private:
    double t_;
};

/// Kernel evaluated at a focal instant where z(t) = 0.
class CausticError : public NumericError
{
public:
    explicit CausticError(double focal_time)
        : NumericError("propagation",
                       "kernel is singular at caustic, focal time t = " + std::to_string(focal_time)),
          focal_time_(focal_time)
    {
    }

    double focal_time() const noexcept { return focal_time_; }

private:
    double focal_time_;
};

/// Energy bracket holds zero or several eigenvalues.
class BracketError : public NumericError
{
public:
    explicit BracketError(const std::string& what) : NumericError("stationary", what) {}
};

} // namespace ermakov
