#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "core.hpp"

namespace ermakov {

/// V = 1/2 m omega^2 q^2.
struct HarmonicPotential
{
    double omega = 1.0;
};

/// V_eff = -e2 / r + l(l+1) hbar^2 / (2 m r^2) on r > 0.
struct CoulombPotential
{
    int l = 0;
    double e2 = 1.0;
};

enum class Boundary {
    full_line,
    /// r > 0 with the regular behaviour q^{l_eff+1} at the origin.
    half_line_regular,
};

struct TabulatedPotential
{
    CubicSpline v;
    Boundary boundary = Boundary::full_line;
    int l_eff = 0;
};

class PotentialSpec
{
public:
    using Kind = std::variant<HarmonicPotential, CoulombPotential, TabulatedPotential>;

    static PotentialSpec harmonic(double omega = 1.0, const UnitSystem& units = {})
    {
        if (!(omega > 0.0) || !std::isfinite(omega))
            throw ValidationError("harmonic potential requires omega > 0");
        units.validate();
        return PotentialSpec(HarmonicPotential{omega}, units);
    }

    static PotentialSpec coulomb(int l, double e2 = 1.0, const UnitSystem& units = {})
    {
        if (l < 0)
            throw ValidationError("Coulomb potential requires l >= 0");
        if (!(e2 > 0.0))
            throw ValidationError("Coulomb potential requires e^2 > 0");
        units.validate();
        return PotentialSpec(CoulombPotential{l, e2}, units);
    }

    /// Cubic-spline potential; beyond the table it continues with the end
    /// knot's Taylor polynomial (quadratic by default).
    static PotentialSpec tabulated(std::vector<double> q, std::vector<double> v, Boundary boundary = Boundary::full_line,
                                   int l_eff = 0, const UnitSystem& units = {},
                                   CubicSpline::Extrapolation tail = CubicSpline::Extrapolation::quadratic)
    {
        if (tail == CubicSpline::Extrapolation::reject)
            throw ValidationError("tabulated potential needs an extrapolation rule");
        units.validate();
        if (l_eff < 0)
            throw ValidationError("tabulated potential requires l_eff >= 0");
        if (boundary == Boundary::half_line_regular && !(q.front() > 0.0))
            throw ValidationError("half-line tabulated potential must start at q > 0");
        return PotentialSpec(
            TabulatedPotential{CubicSpline(std::move(q), std::move(v), tail), boundary, l_eff},
            units);
    }

    const Kind& kind() const noexcept { return kind_; }
    const UnitSystem& units() const noexcept { return units_; }

    bool half_line() const noexcept
    {
        if (std::holds_alternative<CoulombPotential>(kind_))
            return true;
        if (auto t = std::get_if<TabulatedPotential>(&kind_))
            return t->boundary == Boundary::half_line_regular;
        return false;
    }

    /// Angular momentum of the regular solution at the origin (half-line kinds).
    int regular_l() const noexcept
    {
        if (auto c = std::get_if<CoulombPotential>(&kind_))
            return c->l;
        if (auto t = std::get_if<TabulatedPotential>(&kind_))
            return t->l_eff;
        return 0;
    }

    double value(double q) const
    {
        const double hb = units_.hbar, m = units_.mass;
        if (auto h = std::get_if<HarmonicPotential>(&kind_))
            return 0.5 * m * h->omega * h->omega * q * q;
        if (auto c = std::get_if<CoulombPotential>(&kind_))
            return -c->e2 / q + c->l * (c->l + 1) * hb * hb / (2.0 * m * q * q);
        return std::get<TabulatedPotential>(kind_).v(q);
    }

    double derivative(double q) const
    {
        const double hb = units_.hbar, m = units_.mass;
        if (auto h = std::get_if<HarmonicPotential>(&kind_))
            return m * h->omega * h->omega * q;
        if (auto c = std::get_if<CoulombPotential>(&kind_))
            return c->e2 / (q * q) - c->l * (c->l + 1) * hb * hb / (m * q * q * q);
        return std::get<TabulatedPotential>(kind_).v.derivative(q);
    }

    /// (2m / hbar^2)(E - V(q)).
    double kappa(double E, double q) const
    {
        return 2.0 * units_.mass / (units_.hbar * units_.hbar) * (E - value(q));
    }

    /// Location of the potential minimum (largest local wave number).  For
    /// l = 0 Coulomb there is none and `E` picks r = e2 / (2|E|) instead.
    double deepest_point(double E) const
    {
        const double hb = units_.hbar, m = units_.mass;
        if (std::holds_alternative<HarmonicPotential>(kind_))
            return 0.0;
        if (auto c = std::get_if<CoulombPotential>(&kind_)) {
            if (c->l > 0)
                return c->l * (c->l + 1) * hb * hb / (m * c->e2);
            return c->e2 / (2.0 * std::max(std::abs(E), 1e-12));
        }
        const auto& t = std::get<TabulatedPotential>(kind_);
        const auto knots = t.v.knots();
        const auto vals = t.v.values();
        const auto it = std::min_element(vals.begin(), vals.end());
        return knots[static_cast<std::size_t>(it - vals.begin())];
    }

    double minimum_value() const
    {
        if (std::holds_alternative<HarmonicPotential>(kind_))
            return 0.0;
        if (auto c = std::get_if<CoulombPotential>(&kind_)) {
            if (c->l == 0)
                return -std::numeric_limits<double>::infinity();
            return value(deepest_point(0.0));
        }
        const auto vals = std::get<TabulatedPotential>(kind_).v.values();
        return *std::min_element(vals.begin(), vals.end());
    }

    /// Natural energy unit: hbar omega, the hartree m e2^2 / hbar^2, or the
    /// median depth of the table.
    double energy_scale() const
    {
        const double hb = units_.hbar, m = units_.mass;
        if (auto h = std::get_if<HarmonicPotential>(&kind_))
            return hb * h->omega;
        if (auto c = std::get_if<CoulombPotential>(&kind_))
            return m * c->e2 * c->e2 / (hb * hb);
        // Median depth: robust against steep walls at the table edges.
        const auto vals = std::get<TabulatedPotential>(kind_).v.values();
        std::vector<double> sorted(vals.begin(), vals.end());
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
        const double median = sorted[sorted.size() / 2];
        return std::max(median - minimum_value(), 1e-12);
    }

    /// Outermost classical turning points [q_left, q_right] at energy E, or the
    /// deepest point twice when E lies below the potential everywhere.
    std::pair<double, double> turning_points(double E) const
    {
        const double hb = units_.hbar, m = units_.mass;
        if (auto h = std::get_if<HarmonicPotential>(&kind_)) {
            const double qt = E > 0.0 ? std::sqrt(2.0 * E / m) / h->omega : 0.0;
            return {-qt, qt};
        }
        if (auto c = std::get_if<CoulombPotential>(&kind_)) {
            const double cen = c->l * (c->l + 1) * hb * hb / (2.0 * m);
            if (E >= 0.0)
                return {0.0, std::numeric_limits<double>::infinity()};
            const double A = -E, disc = c->e2 * c->e2 - 4.0 * A * cen;
            if (disc < 0.0) {
                const double r = deepest_point(E);
                return {r, r};
            }
            const double s = std::sqrt(disc);
            return {cen > 0.0 ? (c->e2 - s) / (2.0 * A) : 0.0, (c->e2 + s) / (2.0 * A)};
        }
        const auto& t = std::get<TabulatedPotential>(kind_);
        const auto knots = t.v.knots();
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = 0; i < knots.size(); ++i)
            if (t.v.values()[i] < E) {
                lo = std::min(lo, knots[i]);
                hi = std::max(hi, knots[i]);
            }
        if (!(hi >= lo)) {
            const double q = deepest_point(E);
            return {q, q};
        }
        return {lo, hi};
    }

private:
    PotentialSpec(Kind k, const UnitSystem& units) : kind_(std::move(k)), units_(units) {}
    Kind kind_;
    UnitSystem units_;
};

inline double ho_eigenvalue(int n, double omega = 1.0, const UnitSystem& units = {})
{
    if (n < 0)
        throw ValidationError("quantum number must be >= 0");
    return units.hbar * omega * (n + 0.5);
}

/// -(m e2^2 / 2 hbar^2) / (n' + l + 1)^2.
inline double coulomb_eigenvalue(int n_prime, int l, double e2 = 1.0, const UnitSystem& units = {})
{
    if (n_prime < 0 || l < 0)
        throw ValidationError("quantum numbers must be >= 0");
    const double n = n_prime + l + 1;
    return -units.mass * e2 * e2 / (2.0 * units.hbar * units.hbar) / (n * n);
}

} // namespace ermakov
