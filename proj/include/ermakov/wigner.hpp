#pragma once

// Wigner function of the Gaussian packet, held as centre plus second moments:
//   W = (1/pi hbar) exp{-(2/hbar^2)[<p~^2> x~^2 - <[x~,p~]+> x~ p~ + <x~^2> p~^2]}.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "invariant.hpp"

namespace ermakov {

struct WignerGaussian
{
    double x_mean = 0.0;
    double p_mean = 0.0;
    Uncertainties u{};
    UnitSystem units{};

    void validate() const
    {
        u.validate();
        units.validate();
        const double target = 0.25 * units.hbar * units.hbar;
        if (std::abs(u.robertson_schroedinger() - target) > 1e-9 * target)
            throw ValidationError("Wigner Gaussian requires xx pp - (xp/2)^2 = hbar^2/4 (pure state)");
    }

    /// Determinant of the exponent matrix in units of 4/hbar^2; 1 for pure states.
    double purity_determinant() const noexcept
    {
        return 4.0 / (units.hbar * units.hbar) * u.robertson_schroedinger();
    }
};

inline double wigner_eval(const WignerGaussian& w, double x, double p)
{
    const double hb = w.units.hbar;
    const double dx = x - w.x_mean, dp = p - w.p_mean;
    const double q = w.u.pp * dx * dx - w.u.xp * dx * dp + w.u.xx * dp * dp;
    return std::exp(-2.0 / (hb * hb) * q) / (std::numbers::pi * hb);
}

/// W(0, 0, t) = (1/pi hbar) exp{-(2m/hbar) I_L}.
inline double wigner_origin(const ClassicalState& c, const ErmakovState& e, const UnitSystem& units = {})
{
    units.validate();
    return std::exp(-2.0 * units.mass / units.hbar * ermakov_invariant(c, e)) / (std::numbers::pi * units.hbar);
}

/// Packet centred at (eta, m eta') with moments from the width.
inline WignerGaussian wigner_from_state(const ClassicalState& c, const ErmakovState& e, const UnitSystem& units = {})
{
    return {c.eta, units.mass * c.eta_dot, uncertainties_from_width(e, units), units};
}

namespace wigner_detail {

/// Centre and width of W(x, .) in p: the conditional Gaussian at fixed x.
inline std::pair<double, double> conditional_p(const WignerGaussian& w, double x)
{
    const double centre = w.p_mean + 0.5 * w.u.xp / w.u.xx * (x - w.x_mean);
    return {centre, 0.5 * w.units.hbar / std::sqrt(w.u.xx)};
}

inline double trapezoid_p(const WignerGaussian& w, double x, std::size_t points, double sigmas)
{
    const auto [centre, width] = conditional_p(w, x);
    const double hp = 2.0 * sigmas * width / static_cast<double>(points - 1);
    double s = 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        const double wp = (j == 0 || j + 1 == points) ? 0.5 : 1.0;
        s += wp * wigner_eval(w, x, centre - sigmas * width + hp * static_cast<double>(j));
    }
    return s * hp;
}

} // namespace wigner_detail

/// Nested trapezoid quadrature: x over +-`sigmas` marginal widths, p over
/// +-`sigmas` conditional widths around the conditional centre at each x.
inline double wigner_integral(const WignerGaussian& w, std::size_t points = 401, double sigmas = 10.0)
{
    if (points < 3)
        throw ValidationError("Wigner integral needs at least 3 points per axis");
    const double sx = std::sqrt(w.u.xx);
    const double hx = 2.0 * sigmas * sx / static_cast<double>(points - 1);
    double s = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        const double wx = (i == 0 || i + 1 == points) ? 0.5 : 1.0;
        s += wx * wigner_detail::trapezoid_p(w, w.x_mean - sigmas * sx + hx * static_cast<double>(i), points, sigmas);
    }
    return s * hx;
}

/// int W dp at each x by the trapezoid rule.
inline std::vector<double> wigner_position_marginal(const WignerGaussian& w, std::span<const double> x,
                                                    std::size_t points = 401, double sigmas = 10.0)
{
    std::vector<double> out(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = wigner_detail::trapezoid_p(w, x[i], points, sigmas);
    return out;
}

struct WignerSample
{
    double t = 0.0;
    WignerGaussian w{};
};

/// Joint integration of the classical and Ermakov equations, sampled as Wigner Gaussians.
inline std::vector<WignerSample> wigner_trajectory(const FrequencyProfile& profile, const ClassicalState& c0,
                                                   const ErmakovState& e0, const TimeGrid& grid,
                                                   const IntegratorConfig& cfg = {}, const UnitSystem& units = {})
{
    const auto cl = integrate_classical(profile, c0, grid, cfg);
    const auto er = integrate_ermakov(profile, e0, grid, cfg);
    std::vector<WignerSample> out;
    out.reserve(cl.size());
    for (std::size_t i = 0; i < cl.size(); ++i)
        out.push_back({cl[i].t, wigner_from_state(cl[i], er.states[i], units)});
    return out;
}

struct PhaseSpaceGrid
{
    std::vector<double> x;
    std::vector<double> p;
    double dx = 1e-3;
    double dp = 1e-3;
};

struct LiouvilleResult
{
    double residual = 0.0;
    /// Time, x or p steps too coarse for the centered differences to be trusted.
    bool coarse_sampling = false;
};

/// max |dW/dt + (p/m) dW/dx - m omega^2(t) x dW/dp| over the grid and the
/// interior time samples, divided by max|W| / T (T the sampled time span).
/// All derivatives are centered differences.
inline LiouvilleResult liouville_residual(std::span<const WignerSample> traj, const FrequencyProfile& profile,
                                          const PhaseSpaceGrid& grid)
{
    if (traj.size() < 3)
        throw ValidationError("Liouville residual needs at least 3 time samples");
    if (!(grid.dx > 0.0) || !(grid.dp > 0.0) || grid.x.empty() || grid.p.empty())
        throw ValidationError("Liouville residual needs a non-empty grid and positive dx, dp");
    const double dt = traj[1].t - traj[0].t;
    for (std::size_t k = 1; k < traj.size(); ++k)
        if (std::abs((traj[k].t - traj[k - 1].t) - dt) > 1e-9 * std::abs(dt))
            throw ValidationError("Liouville residual needs uniform time sampling");
    const double T = traj.back().t - traj.front().t;
    const double m = traj.front().w.units.mass;

    LiouvilleResult res;
    double wmax = 0.0, rmax = 0.0;
    double min_sx = std::numeric_limits<double>::infinity(), min_sp = min_sx;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const auto& w = traj[k].w;
        min_sx = std::min(min_sx, std::sqrt(w.u.xx));
        min_sp = std::min(min_sp, std::sqrt(w.u.pp));
        const double w2 = profile.omega_sq(traj[k].t);
        for (double x : grid.x)
            for (double p : grid.p) {
                const double W = wigner_eval(w, x, p);
                const double dWdt =
                    (wigner_eval(traj[k + 1].w, x, p) - wigner_eval(traj[k - 1].w, x, p)) / (2.0 * dt);
                const double dWdx = (wigner_eval(w, x + grid.dx, p) - wigner_eval(w, x - grid.dx, p)) / (2.0 * grid.dx);
                const double dWdp = (wigner_eval(w, x, p + grid.dp) - wigner_eval(w, x, p - grid.dp)) / (2.0 * grid.dp);
                wmax = std::max(wmax, W);
                rmax = std::max(rmax, std::abs(dWdt + p / m * dWdx - m * w2 * x * dWdp));
            }
    }
    res.residual = wmax > 0.0 ? rmax * T / wmax : 0.0;
    res.coarse_sampling = dt * profile.max_omega() > 0.05 || grid.dx > 0.05 * min_sx || grid.dp > 0.05 * min_sp;
    return res;
}

} // namespace ermakov
