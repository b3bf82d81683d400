#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "ode.hpp"
#include "spline.hpp"

namespace ermakov {

/// Action and mass scales.  Every formula keeps hbar and m explicit.
struct UnitSystem
{
    double hbar = 1.0;
    double mass = 1.0;

    void validate() const
    {
        if (!(hbar > 0.0) || !(mass > 0.0))
            throw ValidationError("unit system requires hbar > 0 and mass > 0");
    }
};

/// omega^2(t) = omega0^2.
struct ConstantFrequency
{
    double omega0 = 1.0;
};

/// omega = 0.
struct FreeMotion
{
};

/// omega^2(t) = omega0^2 (1 + eps cos(Omega t)), e.g. an ion in a Paul trap.
struct ParametricFrequency
{
    double omega0 = 1.0;
    double eps = 0.0;
    double drive = 1.0;
};

/// omega^2 sampled on a strictly increasing time grid, cubic interpolation.
struct TabulatedFrequency
{
    CubicSpline omega_sq;
};

class FrequencyProfile
{
public:
    using Kind = std::variant<ConstantFrequency, FreeMotion, ParametricFrequency, TabulatedFrequency>;

    FrequencyProfile() : kind_(FreeMotion{}) {}

    static FrequencyProfile constant(double omega0)
    {
        if (!(omega0 >= 0.0) || !std::isfinite(omega0))
            throw ValidationError("constant profile requires omega0 >= 0");
        return FrequencyProfile(ConstantFrequency{omega0});
    }

    static FrequencyProfile free() { return FrequencyProfile(FreeMotion{}); }

    static FrequencyProfile parametric(double omega0, double eps, double drive)
    {
        if (!(omega0 >= 0.0) || !std::isfinite(omega0) || !std::isfinite(drive))
            throw ValidationError("parametric profile requires finite omega0 >= 0 and drive");
        if (!(std::abs(eps) < 1.0))
            throw ValidationError("parametric profile requires |eps| < 1");
        return FrequencyProfile(ParametricFrequency{omega0, eps, drive});
    }

    static FrequencyProfile tabulated(std::vector<double> t, std::vector<double> omega_sq)
    {
        return FrequencyProfile(TabulatedFrequency{CubicSpline(std::move(t), std::move(omega_sq))});
    }

    const Kind& kind() const noexcept { return kind_; }

    double omega_sq(double t) const
    {
        struct Visitor
        {
            double t;
            double operator()(const ConstantFrequency& c) const { return c.omega0 * c.omega0; }
            double operator()(const FreeMotion&) const { return 0.0; }
            double operator()(const ParametricFrequency& p) const
            {
                return p.omega0 * p.omega0 * (1.0 + p.eps * std::cos(p.drive * t));
            }
            double operator()(const TabulatedFrequency& tab) const { return tab.omega_sq(t); }
        };
        return std::visit(Visitor{t}, kind_);
    }

    /// Upper bound of omega over all t (over the table for tabulated profiles).
    double max_omega() const
    {
        struct Visitor
        {
            double operator()(const ConstantFrequency& c) const { return c.omega0; }
            double operator()(const FreeMotion&) const { return 0.0; }
            double operator()(const ParametricFrequency& p) const
            {
                return p.omega0 * std::sqrt(1.0 + std::abs(p.eps));
            }
            double operator()(const TabulatedFrequency& tab) const
            {
                double mx = 0.0;
                for (double w2 : tab.omega_sq.values())
                    mx = std::max(mx, w2);
                return std::sqrt(mx);
            }
        };
        return std::visit(Visitor{}, kind_);
    }

private:
    explicit FrequencyProfile(Kind k) : kind_(std::move(k)) {}
    Kind kind_;
};

inline double eval_frequency_sq(const FrequencyProfile& profile, double t)
{
    if (!std::isfinite(t))
        throw ValidationError("time must be finite");
    return profile.omega_sq(t);
}

struct ClassicalState
{
    double eta = 0.0;
    double eta_dot = 0.0;
    double t = 0.0;
};

struct TimeGrid
{
    double t0 = 0.0;
    double t1 = 1.0;
    std::size_t samples = 2;

    void validate() const
    {
        if (!(t1 > t0) || !std::isfinite(t0) || !std::isfinite(t1))
            throw ValidationError("time grid requires finite t1 > t0");
        if (samples < 2)
            throw ValidationError("time grid requires at least 2 samples");
    }

    std::vector<double> times() const { return linspace(t0, t1, samples); }
};

/// Solves eta'' + omega^2(t) eta = 0 and samples it on the grid.  The initial
/// state is taken at grid.t0 (state0.t is ignored).
inline std::vector<ClassicalState> integrate_classical(const FrequencyProfile& profile, const ClassicalState& state0,
                                                       const TimeGrid& grid, const IntegratorConfig& cfg = {})
{
    grid.validate();
    if (!std::isfinite(state0.eta) || !std::isfinite(state0.eta_dot))
        throw ValidationError("classical initial state must be finite");
    auto rhs = [&](double t, const Vec<2>& y) { return Vec<2>{y[1], -profile.omega_sq(t) * y[0]}; };
    const auto times = grid.times();
    const auto sol = integrate_ode<2>(rhs, grid.t0, Vec<2>{state0.eta, state0.eta_dot}, times, cfg, {},
                                      "core_model");
    std::vector<ClassicalState> out;
    out.reserve(sol.t.size());
    for (std::size_t i = 0; i < sol.t.size(); ++i)
        out.push_back({sol.y[i][0], sol.y[i][1], sol.t[i]});
    return out;
}

inline double classical_energy(const ClassicalState& s, double omega_sq)
{
    return 0.5 * (s.eta_dot * s.eta_dot + omega_sq * s.eta * s.eta);
}

} // namespace ermakov
