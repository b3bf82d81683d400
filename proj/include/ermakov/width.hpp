#pragma once

// Width dynamics of a Gaussian packet in three equivalent pictures: the
// complex Riccati variable Y = (2 hbar / m) y, the real Ermakov pair
// (alpha, phi), and the linearizing variable lambda = u + i z with
// lambda'' + omega^2 lambda = 0 and Y = lambda' / lambda.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"

namespace ermakov {

using Complex = std::complex<double>;

struct RiccatiState
{
    Complex Y{0.0, 1.0};

    void validate() const
    {
        if (!(Y.imag() > 0.0))
            throw ValidationError("Riccati state requires Im Y > 0 (normalizable packet)");
    }
};

struct ErmakovState
{
    double alpha = 1.0;
    double alpha_dot = 0.0;
    double phi = 0.0;
};

struct LambdaState
{
    double u = 1.0;
    double z = 0.0;
    double u_dot = 0.0;
    double z_dot = 1.0;

    Complex lambda() const noexcept { return {u, z}; }
    Complex lambda_dot() const noexcept { return {u_dot, z_dot}; }
};

template <class State>
struct Trajectory
{
    std::vector<double> t;
    std::vector<State> states;

    std::size_t size() const noexcept { return t.size(); }
};

inline double wronskian(const LambdaState& l) noexcept
{
    return l.z_dot * l.u - l.u_dot * l.z;
}

inline constexpr double wronskian_input_tolerance = 1e-12;
inline constexpr double riccati_blowup_threshold = 1e12;

/// Unit-Wronskian lambda state with the given Ermakov data (alpha, alpha', phi).
inline LambdaState lambda_from_ermakov(const ErmakovState& e)
{
    // lambda = alpha e^{i phi}, lambda' = (alpha' + i / alpha) e^{i phi}.
    const Complex rot = std::polar(1.0, e.phi);
    const Complex l = e.alpha * rot;
    const Complex ld = Complex(e.alpha_dot, 1.0 / e.alpha) * rot;
    return {l.real(), l.imag(), ld.real(), ld.imag()};
}

/// Unit-Wronskian lambda state whose logarithmic derivative is Y, with
/// arg lambda = phi.
inline LambdaState lambda_from_riccati(const RiccatiState& r, double phi = 0.0)
{
    r.validate();
    const double alpha = 1.0 / std::sqrt(r.Y.imag());
    return lambda_from_ermakov({alpha, r.Y.real() * alpha, phi});
}

inline Trajectory<LambdaState> integrate_lambda(const FrequencyProfile& profile, const LambdaState& l0,
                                                const TimeGrid& grid, const IntegratorConfig& cfg = {})
{
    grid.validate();
    if (std::abs(wronskian(l0) - 1.0) > wronskian_input_tolerance)
        throw ValidationError("lambda initial data must satisfy z'u - u'z = 1 (got " +
                              std::to_string(wronskian(l0)) + ")");
    auto rhs = [&](double t, const Vec<4>& y) {
        const double w2 = profile.omega_sq(t);
        return Vec<4>{y[2], y[3], -w2 * y[0], -w2 * y[1]};
    };
    const auto times = grid.times();
    const auto sol =
        integrate_ode<4>(rhs, grid.t0, Vec<4>{l0.u, l0.z, l0.u_dot, l0.z_dot}, times, cfg, {}, "width_dynamics");
    Trajectory<LambdaState> out;
    out.t = sol.t;
    for (const auto& y : sol.y)
        out.states.push_back({y[0], y[1], y[2], y[3]});
    return out;
}

/// Direct integration of Y' + Y^2 + omega^2 = 0.
inline Trajectory<RiccatiState> integrate_riccati(const FrequencyProfile& profile, const RiccatiState& y0,
                                                  const TimeGrid& grid, const IntegratorConfig& cfg = {})
{
    grid.validate();
    y0.validate();
    auto rhs = [&](double t, const Vec<2>& y) {
        const double w2 = profile.omega_sq(t);
        // (a + ib)^2 = a^2 - b^2 + 2iab
        return Vec<2>{-(y[0] * y[0] - y[1] * y[1]) - w2, -2.0 * y[0] * y[1]};
    };
    auto blowup = [](double t, const Vec<2>& y) {
        if (std::hypot(y[0], y[1]) > riccati_blowup_threshold || !std::isfinite(y[0]) || !std::isfinite(y[1]))
            throw BlowUpError(t, "Riccati variable |Y| exceeded 1e12 (lambda zero crossing)");
        return false;
    };
    const auto times = grid.times();
    const auto sol =
        integrate_ode<2>(rhs, grid.t0, Vec<2>{y0.Y.real(), y0.Y.imag()}, times, cfg, blowup, "width_dynamics");
    Trajectory<RiccatiState> out;
    out.t = sol.t;
    for (std::size_t i = 0; i < sol.y.size(); ++i) {
        if (!(sol.y[i][1] > 0.0))
            throw NumericError("width_dynamics", "Im Y lost positivity at t = " + std::to_string(sol.t[i]));
        out.states.push_back({Complex(sol.y[i][0], sol.y[i][1])});
    }
    return out;
}

/// alpha'' + omega^2 alpha = 1 / alpha^3 with phi' = 1 / alpha^2.
inline Trajectory<ErmakovState> integrate_ermakov(const FrequencyProfile& profile, const ErmakovState& e0,
                                                  const TimeGrid& grid, const IntegratorConfig& cfg = {})
{
    grid.validate();
    if (!(e0.alpha > 0.0))
        throw ValidationError("Ermakov initial width alpha0 must be positive");
    auto rhs = [&](double t, const Vec<3>& y) {
        const double a = y[0];
        const double inv2 = 1.0 / (a * a);
        return Vec<3>{y[1], -profile.omega_sq(t) * a + inv2 / a, inv2};
    };
    const double floor = 1e-12 * e0.alpha;
    auto collapse = [floor](double t, const Vec<3>& y) {
        if (!(y[0] > floor))
            throw NumericError("width_dynamics",
                               "alpha collapsed to zero at t = " + std::to_string(t) + " (integrator failure)");
        return false;
    };
    const auto times = grid.times();
    const auto sol = integrate_ode<3>(rhs, grid.t0, Vec<3>{e0.alpha, e0.alpha_dot, e0.phi}, times, cfg, collapse,
                                      "width_dynamics");
    Trajectory<ErmakovState> out;
    out.t = sol.t;
    for (const auto& y : sol.y)
        out.states.push_back({y[0], y[1], y[2]});
    return out;
}

inline RiccatiState riccati_from_lambda(const LambdaState& l)
{
    const double mod2 = l.u * l.u + l.z * l.z;
    if (!(mod2 > 0.0))
        throw DomainError("lambda = 0: logarithmic derivative undefined");
    return {l.lambda_dot() * std::conj(l.lambda()) / mod2};
}

/// alpha = |lambda|, phi = arg lambda, alpha' = (u u' + z z') / alpha.  If
/// `phi_previous` is given, phi is shifted by a multiple of 2 pi to lie
/// within pi of it (continuous tracking along a trajectory).
inline ErmakovState polar_decompose(const LambdaState& l, std::optional<double> phi_previous = std::nullopt)
{
    const double alpha = std::hypot(l.u, l.z);
    if (!(alpha > 0.0))
        throw DomainError("lambda = 0: polar decomposition undefined");
    double phi = std::atan2(l.z, l.u);
    if (phi_previous) {
        constexpr double two_pi = 2.0 * std::numbers::pi;
        phi += two_pi * std::round((*phi_previous - phi) / two_pi);
    }
    return {alpha, (l.u * l.u_dot + l.z * l.z_dot) / alpha, phi};
}

/// Polar form along a sampled trajectory with continuously unwrapped phase.
inline std::vector<ErmakovState> polar_decompose(std::span<const LambdaState> trajectory)
{
    std::vector<ErmakovState> out;
    out.reserve(trajectory.size());
    std::optional<double> prev;
    for (const auto& l : trajectory) {
        out.push_back(polar_decompose(l, prev));
        prev = out.back().phi;
    }
    return out;
}

struct ComplementarySolution
{
    double u = 0.0;
    double u_dot = 0.0;
};

/// Reduction of order: given samples of z (no zero between t_ref and t),
/// returns u(t) = z(t) [u_ref / z(t_ref) - int_{t_ref}^{t} dt' / z^2], which
/// obeys z'u - u'z = 1.  `u_ref` fixes the free multiple of z.
inline ComplementarySolution u_from_z(std::span<const double> times, std::span<const double> z, double t,
                                      double t_ref, double u_ref)
{
    if (times.size() != z.size() || times.size() < 3)
        throw ValidationError("u_from_z needs matching time/z samples (at least 3)");
    const double lo = std::min(t, t_ref), hi = std::max(t, t_ref);
    if (lo < times.front() || hi > times.back())
        throw RangeError("u_from_z window outside the sampled z history");
    CubicSpline zs({times.begin(), times.end()}, {z.begin(), z.end()});
    // Window check on the samples and on the endpoints.
    const double s0 = zs(lo);
    if (s0 == 0.0)
        throw DomainError("singular window: z vanishes at the window edge");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < lo || times[i] > hi)
            continue;
        if (z[i] == 0.0 || std::signbit(z[i]) != std::signbit(s0))
            throw DomainError("singular window: z has a zero inside [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "]");
    }
    const double zt = zs(t), zr = zs(t_ref);
    if (zt == 0.0 || zr == 0.0 || std::signbit(zt) != std::signbit(zr))
        throw DomainError("singular window: z vanishes between t_ref and t");
    auto inv_sq = [&](double s) {
        const double v = zs(s);
        return 1.0 / (v * v);
    };
    const double integral =
        (t == t_ref) ? 0.0 : boost::math::quadrature::gauss_kronrod<double, 15>::integrate(inv_sq, t_ref, t, 20, 1e-13);
    const double g = u_ref / zr - integral;
    const double zdot = zs.derivative(t);
    return {zt * g, zdot * g - 1.0 / zt};
}

} // namespace ermakov
