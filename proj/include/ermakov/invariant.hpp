#pragma once

#include <cmath>
#include <complex>

#include "core.hpp"
#include "width.hpp"

namespace ermakov {

/// Second moments of a Gaussian packet: <x~^2>, <p~^2> and <x~p~ + p~x~>.
struct Uncertainties
{
    double xx = 0.5;
    double pp = 0.5;
    double xp = 0.0;

    /// xx pp - (xp/2)^2, equal to hbar^2/4 for every pure Gaussian.
    double robertson_schroedinger() const noexcept { return xx * pp - 0.25 * xp * xp; }

    void validate() const
    {
        if (!(xx > 0.0) || !(pp > 0.0))
            throw ValidationError("uncertainties require <x~^2> > 0 and <p~^2> > 0");
    }
};

struct FactorPair
{
    Complex A;
    Complex A_star;
};

/// I_L = 1/2 [(eta' alpha - eta alpha')^2 + (eta / alpha)^2].
inline double ermakov_invariant(const ClassicalState& c, const ErmakovState& e)
{
    if (!(e.alpha > 0.0))
        throw ValidationError("Ermakov invariant requires alpha > 0");
    const double a = c.eta_dot * e.alpha - c.eta * e.alpha_dot;
    const double b = c.eta / e.alpha;
    return 0.5 * (a * a + b * b);
}

/// Same invariant written in terms of z = (m / alpha0 p0) eta, with the
/// prefactor (alpha0 p0 / m)^2.
inline double ermakov_invariant_from_z(double z, double z_dot, const ErmakovState& e, double alpha0, double p0,
                                       const UnitSystem& units = {})
{
    const double pref = alpha0 * p0 / units.mass;
    const double a = z_dot * e.alpha - z * e.alpha_dot;
    const double b = z / e.alpha;
    return 0.5 * pref * pref * (a * a + b * b);
}

/// xx = hbar alpha^2 / 2m, pp = (hbar m / 2)(alpha'^2 + 1/alpha^2), xp = hbar alpha alpha'.
inline Uncertainties uncertainties_from_width(const ErmakovState& e, const UnitSystem& units = {})
{
    if (!(e.alpha > 0.0))
        throw ValidationError("uncertainties require alpha > 0");
    units.validate();
    const double a2 = e.alpha * e.alpha;
    return {units.hbar * a2 / (2.0 * units.mass),
            0.5 * units.hbar * units.mass * (e.alpha_dot * e.alpha_dot + 1.0 / a2), units.hbar * e.alpha * e.alpha_dot};
}

inline Uncertainties uncertainties_from_width(const RiccatiState& r, const UnitSystem& units = {})
{
    r.validate();
    const double alpha = 1.0 / std::sqrt(r.Y.imag());
    return uncertainties_from_width(ErmakovState{alpha, r.Y.real() * alpha, 0.0}, units);
}

/// (1 / m hbar) [<p~^2> eta^2 - <[x~,p~]+> eta (m eta') + <x~^2> (m eta')^2].
/// Equals ermakov_invariant() for uncertainties derived from the same width.
inline double invariant_bilinear(const ClassicalState& c, const Uncertainties& u, const UnitSystem& units = {})
{
    u.validate();
    units.validate();
    const double p = units.mass * c.eta_dot;
    return (u.pp * c.eta * c.eta - u.xp * c.eta * p + u.xx * p * p) / (units.mass * units.hbar);
}

/// Unit-carrying variant (m / hbar) I_L, the combination entering W(0, 0, t).
inline double invariant_with_units(const ClassicalState& c, const ErmakovState& e, const UnitSystem& units = {})
{
    return units.mass * ermakov_invariant(c, e) / units.hbar;
}

/// A = eta' - Y eta and its conjugate; 1/2 alpha^2 A A* = I_L with alpha^2 = 1 / Im Y.
inline FactorPair factorize(const ClassicalState& c, const RiccatiState& r)
{
    r.validate();
    const Complex A = c.eta_dot - r.Y * c.eta;
    return {A, std::conj(A)};
}

inline double invariant_from_factors(const FactorPair& f, const RiccatiState& r)
{
    return 0.5 * std::real(f.A * f.A_star) / r.Y.imag();
}

} // namespace ermakov
