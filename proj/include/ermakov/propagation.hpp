#pragma once

// Feynman kernel of the (time-dependent) oscillator parameterized by the
// cartesian lambda data (u, z), quadrature propagation of Gaussian packets
// through it, the closed-form packet, and the classical expression for the
// packet width.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "core.hpp"
#include "width.hpp"

namespace ermakov {

struct SpatialGrid
{
    double x_min = -10.0;
    double x_max = 10.0;
    std::size_t points = 401;

    void validate() const
    {
        if (!(x_max > x_min))
            throw ValidationError("spatial grid requires x_max > x_min");
        if (points < 16)
            throw ValidationError("spatial grid requires at least 16 points");
    }

    double dx() const noexcept { return (x_max - x_min) / static_cast<double>(points - 1); }
    double x(std::size_t i) const noexcept { return x_min + dx() * static_cast<double>(i); }
    std::vector<double> coordinates() const { return linspace(x_min, x_max, points); }
};

struct KernelParams
{
    double t = 0.0;
    double u = 1.0;
    double z = 0.0;
    double u_dot = 0.0;
    double z_dot = 1.0;
    double alpha0 = 1.0;
    /// Branch phase of the prefactor square root: -pi/2 per zero of z in (0, t).
    double maslov_phase = 0.0;
    /// arg(u + i z), continuous from 0 at t = 0.
    double lambda_phase = 0.0;
    int caustics = 0;
    UnitSystem units{};

    LambdaState lambda() const noexcept { return {u, z, u_dot, z_dot}; }
};

/// Initial packet (mb0/pi hbar)^{1/4} exp{(i m / 2 hbar)[i b0 x^2 + 2 (p0/m) x]}, b0 = 1/alpha0^2.
struct InitialPacket
{
    double alpha0 = 1.0;
    double p0 = 0.0;
    UnitSystem units{};

    double beta0() const noexcept { return 1.0 / (alpha0 * alpha0); }

    Complex operator()(const Complex& x) const
    {
        const double m = units.mass, hb = units.hbar;
        const Complex i(0.0, 1.0);
        return std::pow(m * beta0() / (std::numbers::pi * hb), 0.25) *
               std::exp(i * m / (2.0 * hb) * (i * beta0() * x * x + 2.0 * (p0 / m) * x));
    }
};

namespace propagation_detail {

inline double caustic_guard(const FrequencyProfile& profile)
{
    // Zeros of z are at least pi / omega_max apart.
    const double wmax = profile.max_omega();
    return wmax > 0.0 ? std::numbers::pi / (8.0 * wmax) : std::numeric_limits<double>::infinity();
}

} // namespace propagation_detail

/// Integrates lambda with u(0) = alpha0, z(0) = 0, u'(0) = 0, z'(0) = 1/alpha0
/// up to t and counts the zeros of z crossed on the way.
inline KernelParams kernel_params(const FrequencyProfile& profile, double alpha0, double t,
                                  const IntegratorConfig& cfg = {}, const UnitSystem& units = {})
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw ValidationError("kernel time must be finite and >= 0");
    if (!(alpha0 > 0.0))
        throw ValidationError("kernel requires alpha0 > 0");
    units.validate();
    KernelParams k;
    k.t = t;
    k.alpha0 = alpha0;
    k.units = units;
    k.u = alpha0;
    k.z = 0.0;
    k.u_dot = 0.0;
    k.z_dot = 1.0 / alpha0;
    if (t == 0.0)
        return k;

    const double guard = propagation_detail::caustic_guard(profile);
    const auto n = std::isfinite(guard) ? static_cast<std::size_t>(std::ceil(t / guard)) + 1 : std::size_t{2};
    const auto traj = integrate_lambda(profile, k.lambda(), TimeGrid{0.0, t, std::max<std::size_t>(n, 2)}, cfg);
    const auto polar = polar_decompose(std::span<const LambdaState>(traj.states));

    int zeros = 0;
    double last_sign = 1.0; // z > 0 just after t = 0
    for (std::size_t i = 1; i < traj.size(); ++i) {
        const double zi = traj.states[i].z;
        if (zi == 0.0)
            continue;
        const double s = zi > 0.0 ? 1.0 : -1.0;
        if (s != last_sign && (i + 1 < traj.size() || std::abs(zi) > 0.0))
            ++zeros;
        last_sign = s;
    }
    const auto& last = traj.states.back();
    k.u = last.u;
    k.z = last.z;
    k.u_dot = last.u_dot;
    k.z_dot = last.z_dot;
    k.caustics = zeros;
    k.maslov_phase = -0.5 * std::numbers::pi * zeros;
    k.lambda_phase = polar.back().phi;
    return k;
}

inline constexpr double caustic_threshold = 1e-12;

namespace propagation_detail {

/// The x'-dependent part of log G.
inline Complex kernel_exponent_source(const KernelParams& k, double x, const Complex& xp)
{
    const double m = k.units.mass, hb = k.units.hbar;
    const Complex i(0.0, 1.0);
    const Complex s = xp / k.alpha0;
    return i * m / (2.0 * hb) * (-2.0 * x * s / k.z + (k.u / k.z) * s * s);
}

inline Complex kernel_exponent_target(const KernelParams& k, double x)
{
    return Complex(0.0, k.units.mass / (2.0 * k.units.hbar) * (k.z_dot / k.z) * x * x);
}

/// log G without the prefactor, for complex source point x'.
inline Complex kernel_exponent(const KernelParams& k, double x, const Complex& xp)
{
    return kernel_exponent_target(k, x) + kernel_exponent_source(k, x, xp);
}

inline Complex kernel_prefactor(const KernelParams& k)
{
    const double m = k.units.mass, hb = k.units.hbar;
    const double mod = std::sqrt(m / (2.0 * std::numbers::pi * hb * k.alpha0 * std::abs(k.z)));
    // (1/i)^{1/2} = e^{-i pi/4} branch for z > 0; each caustic adds -pi/2.
    return std::polar(mod, -0.25 * std::numbers::pi + k.maslov_phase);
}

inline void require_regular(const KernelParams& k)
{
    if (std::abs(k.z) < caustic_threshold)
        throw CausticError(k.t);
}

} // namespace propagation_detail

/// G(x, x', t, 0) = (m / 2 pi i hbar alpha0 z)^{1/2}
///   exp{(i m / 2 hbar)[(z'/z) x^2 - 2 (x/z)(x'/alpha0) + (u/z)(x'/alpha0)^2]}.
inline Complex kernel_eval(const KernelParams& k, double x, double x_prime)
{
    propagation_detail::require_regular(k);
    return propagation_detail::kernel_prefactor(k) *
           std::exp(propagation_detail::kernel_exponent(k, x, Complex(x_prime, 0.0)));
}

/// Analytic continuation of the kernel to complex x'.
inline Complex kernel_eval(const KernelParams& k, double x, const Complex& x_prime)
{
    propagation_detail::require_regular(k);
    return propagation_detail::kernel_prefactor(k) * std::exp(propagation_detail::kernel_exponent(k, x, x_prime));
}

/// Closed-form packet at the time of `k`, in the non-singular form
///   (m/pi hbar)^{1/4} lambda^{-1/2} exp{(i m / 2 hbar)[(lambda'/lambda) x^2 + (2 c x - c^2 z) / lambda]},
/// c = p0 alpha0 / m, which equals the (z'/z, 1/z(u+iz)) form wherever z != 0.
/// The branch of lambda^{-1/2} follows the continuous phase of lambda.
inline Complex packet_value(const KernelParams& k, double p0, double x)
{
    const double m = k.units.mass, hb = k.units.hbar;
    const Complex g(0.0, m / (2.0 * hb));
    const Complex lam(k.u, k.z), lamd(k.u_dot, k.z_dot);
    const double c = p0 * k.alpha0 / m;
    const Complex A = g * lamd / lam, B = g * 2.0 * c / lam, C = -g * c * c * k.z / lam;
    // Modulus from the Gaussian integral of the exponent itself; equal to
    // (m/pi hbar)^{1/4} |lambda|^{-1/2} for unit Wronskian, exactly normalized otherwise.
    const double ar = A.real(), br = B.real();
    const double log_mod = -0.25 * std::log(std::numbers::pi / (-2.0 * ar)) - C.real() + br * br / (4.0 * ar);
    return std::exp(Complex(log_mod, -0.5 * k.lambda_phase) + A * x * x + B * x + C);
}

inline std::vector<Complex> packet_closed_form(const KernelParams& k, double p0, const SpatialGrid& grid)
{
    grid.validate();
    if (std::abs(wronskian(k.lambda()) - 1.0) > 1e-6)
        throw ValidationError("kernel parameters violate the unit Wronskian");
    std::vector<Complex> out(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i)
        out[i] = packet_value(k, p0, grid.x(i));
    return out;
}

/// Gaussian packet with its classical and width data at one instant.
struct GaussianPacket
{
    double eta = 0.0;
    double p = 0.0;
    LambdaState width{};
    double alpha0 = 1.0;
    double p0 = 0.0;
    UnitSystem units{};
    double lambda_phase = 0.0;

    static GaussianPacket from_kernel(const KernelParams& k, double p0)
    {
        const double c = p0 * k.alpha0 / k.units.mass;
        return {c * k.z, k.units.mass * c * k.z_dot, k.lambda(), k.alpha0, p0, k.units, k.lambda_phase};
    }

    double alpha_sq() const noexcept { return width.u * width.u + width.z * width.z; }
    double position_variance() const noexcept { return units.hbar * alpha_sq() / (2.0 * units.mass); }

    Complex operator()(double x) const
    {
        KernelParams k;
        k.u = width.u;
        k.z = width.z;
        k.u_dot = width.u_dot;
        k.z_dot = width.z_dot;
        k.alpha0 = alpha0;
        k.units = units;
        k.lambda_phase = lambda_phase;
        return packet_value(k, p0, x);
    }
};

enum class QuadratureMethod {
    /// Adaptive Gauss-Kronrod along the steepest-descent line through the saddle of G * Psi0.
    steepest_descent,
    /// Adaptive Gauss-Kronrod on the truncated real axis.
    real_line,
    /// Trapezoid rule on a uniform source grid (cheap oracle).
    trapezoid,
};

struct QuadratureOptions
{
    QuadratureMethod method = QuadratureMethod::steepest_descent;
    double tolerance = 1e-13;
    std::size_t trapezoid_points = 8001;
};

struct PropagationResult
{
    std::vector<double> x;
    std::vector<Complex> psi;
    /// Probability mass of the packet (initial or propagated) outside the grid.
    double tail_mass = 0.0;
    bool tail_warning = false;
};

inline constexpr double tail_mass_warning = 1e-12;
inline constexpr double tail_mass_error = 1e-8;

namespace propagation_detail {

/// Adaptive Gauss-Kronrod (15 points) to an absolute error target.
template <class F>
Complex adaptive_gk_abs(const F& f, double a, double b, double target, unsigned depth = 20)
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    auto rec = [&](auto&& self, double lo, double hi, double tgt, unsigned d) -> Complex {
        double e = 0.0;
        const Complex est = GK::integrate(f, lo, hi, 0, 0.0, &e);
        // The single-pass error estimate is reported on [-1, 1]; rescale to [lo, hi].
        e *= 0.5 * (hi - lo);
        if (e <= tgt || d == 0)
            return est;
        const double mid = 0.5 * (lo + hi);
        return self(self, lo, mid, 0.5 * tgt, d - 1) + self(self, mid, hi, 0.5 * tgt, d - 1);
    };
    return rec(rec, a, b, target, depth);
}

/// int |f| from a single Gauss-Kronrod pass.
template <class F>
double gk_l1(const F& f, double a, double b)
{
    double e = 0.0, l1 = 0.0;
    boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &e, &l1);
    return l1;
}

/// Target tol * int |f| rather than tol * |result|: a relative target stalls
/// where the result is tiny, since rounding noise never falls below it.
template <class F>
Complex adaptive_gk(const F& f, double a, double b, double tol, unsigned depth = 20)
{
    return adaptive_gk_abs(f, a, b, tol * std::max(gk_l1(f, a, b), std::numeric_limits<double>::min()), depth);
}

inline double gaussian_tail(double center, double variance, double lo, double hi)
{
    const double s = std::sqrt(2.0 * variance);
    return 0.5 * std::erfc((hi - center) / s) + 0.5 * std::erfc((center - lo) / s);
}

} // namespace propagation_detail

/// Psi(x, t) = int dx' G(x, x', t, 0) Psi0(x') evaluated per output point.
inline PropagationResult propagate_quadrature(const KernelParams& k, const InitialPacket& initial,
                                              const SpatialGrid& grid, const QuadratureOptions& opt = {})
{
    grid.validate();
    if (std::abs(initial.alpha0 - k.alpha0) > 1e-14 * k.alpha0)
        throw ValidationError("initial packet width must match the kernel alpha0");
    const double m = k.units.mass, hb = k.units.hbar;

    PropagationResult res;
    res.x = grid.coordinates();
    res.psi.resize(grid.points);

    const auto packet = GaussianPacket::from_kernel(k, initial.p0);
    const double tail0 =
        propagation_detail::gaussian_tail(0.0, hb / (2.0 * m * initial.beta0()), grid.x_min, grid.x_max);
    const double tail_t =
        propagation_detail::gaussian_tail(packet.eta, packet.position_variance(), grid.x_min, grid.x_max);
    res.tail_mass = std::max(tail0, tail_t);
    if (res.tail_mass > tail_mass_error)
        throw ValidationError("spatial grid too narrow: tail mass " + std::to_string(res.tail_mass) +
                              " exceeds 1e-8");
    res.tail_warning = res.tail_mass > tail_mass_warning;

    if (k.t == 0.0) {
        for (std::size_t i = 0; i < grid.points; ++i)
            res.psi[i] = initial(Complex(res.x[i], 0.0));
        return res;
    }
    propagation_detail::require_regular(k);

    const Complex i1(0.0, 1.0);
    // Source-side envelope of Psi0: exp(-m b0 x'^2 / 2 hbar), truncated where < 1e-17.
    const double src_half_width = std::sqrt(2.0 * 39.0 * hb / (m * initial.beta0()));
    const double a0 = k.alpha0;

    for (std::size_t ix = 0; ix < grid.points; ++ix) {
        const double x = res.x[ix];
        // One exponential for G * Psi0 so that neither factor overflows on the complex path;
        // the x-only phase of G is applied after the integral.
        const Complex pref = propagation_detail::kernel_prefactor(k) *
                             std::pow(m * initial.beta0() / (std::numbers::pi * hb), 0.25);
        auto integrand = [&](const Complex& xp) {
            const Complex log_src = i1 * m / (2.0 * hb) * (i1 * initial.beta0() * xp * xp + 2.0 * (initial.p0 / m) * xp);
            return pref * std::exp(propagation_detail::kernel_exponent_source(k, x, xp) + log_src);
        };
        Complex value;
        switch (opt.method) {
        case QuadratureMethod::steepest_descent: {
            // log(G Psi0) = Q x'^2 + L x' + const.
            const Complex Q = i1 * m / (2.0 * hb) * (k.u / (k.z * a0 * a0)) - m * initial.beta0() / (2.0 * hb);
            const Complex L = i1 * m / (2.0 * hb) * (-2.0 * x / (k.z * a0)) + i1 * initial.p0 / hb;
            const Complex xc = -L / (2.0 * Q);
            double theta = 0.5 * (std::numbers::pi - std::arg(Q));
            if (theta > 0.5 * std::numbers::pi)
                theta -= std::numbers::pi;
            const Complex dir = std::polar(1.0, theta);
            const double smax = std::sqrt(45.0 / std::abs(Q));
            // On the path the log-integrand is E(xc) + Q (dir s)^2 exactly; the
            // kernel itself is evaluated at the saddle.
            const Complex at_saddle = integrand(xc);
            const Complex curvature = Q * dir * dir;
            auto f = [&](double s) { return at_saddle * std::exp(curvature * s * s) * dir; };
            value = propagation_detail::adaptive_gk(f, -smax, smax, opt.tolerance);
            break;
        }
        case QuadratureMethod::real_line: {
            // Split so that each panel carries a bounded number of oscillations.
            const double X = src_half_width;
            const double chirp = m / hb * std::abs(k.u / (k.z * a0 * a0)) * X;
            const double lin = m / hb * std::abs(x / (k.z * a0)) + std::abs(initial.p0) / hb;
            const double max_freq = chirp + lin;
            const auto panels = std::max<std::size_t>(
                8, static_cast<std::size_t>(std::ceil(max_freq * 2.0 * X / (2.0 * std::numbers::pi) / 2.0)));
            auto f = [&](double s) { return integrand(Complex(s, 0.0)); };
            const double w = 2.0 * X / static_cast<double>(panels);
            auto edge = [&](std::size_t p) { return -X + w * static_cast<double>(p); };
            double l1 = 0.0;
            for (std::size_t p = 0; p < panels; ++p)
                l1 += propagation_detail::gk_l1(f, edge(p), edge(p + 1));
            // Rounding of a phase of size P leaves relative noise ~ eps * P; do not ask for less.
            const double phase = 0.5 * (chirp + lin) * X;
            const double rel = std::max(opt.tolerance, 16.0 * std::numeric_limits<double>::epsilon() * phase);
            const double target = rel * std::max(l1, std::numeric_limits<double>::min()) /
                                  static_cast<double>(panels);
            for (std::size_t p = 0; p < panels; ++p)
                value += propagation_detail::adaptive_gk_abs(f, edge(p), edge(p + 1), target, 10);
            break;
        }
        case QuadratureMethod::trapezoid: {
            const std::size_t n = std::max<std::size_t>(opt.trapezoid_points, 16);
            const double X = src_half_width;
            const double h = 2.0 * X / static_cast<double>(n - 1);
            for (std::size_t j = 0; j < n; ++j) {
                const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
                value += w * integrand(Complex(-X + h * static_cast<double>(j), 0.0));
            }
            value *= h;
            break;
        }
        }
        res.psi[ix] = value * std::exp(propagation_detail::kernel_exponent_target(k, x));
    }
    return res;
}

struct PacketMoments
{
    double norm = 0.0;
    double mean = 0.0;
    double variance = 0.0;
};

/// Norm, <x> and <x~^2> of sampled values by the trapezoid rule.
inline PacketMoments packet_moments(std::span<const double> x, std::span<const Complex> psi)
{
    PacketMoments mo;
    const std::size_t n = x.size();
    if (n < 2 || psi.size() != n)
        throw ValidationError("moments need matching samples");
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * (x[1] - x[0]);
        const double rho = std::norm(psi[i]);
        s0 += w * rho;
        s1 += w * rho * x[i];
    }
    mo.norm = s0;
    mo.mean = s1 / s0;
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * (x[1] - x[0]);
        const double d = x[i] - mo.mean;
        s2 += w * std::norm(psi[i]) * d * d;
    }
    mo.variance = s2 / s0;
    return mo;
}

/// L2 distance of two sampled wave functions on a uniform grid (trapezoid).
inline double l2_distance(std::span<const double> x, std::span<const Complex> a, std::span<const Complex> b)
{
    double s = 0.0;
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double w = ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * (x[1] - x[0]);
        s += w * std::norm(a[i] - b[i]);
    }
    return std::sqrt(s);
}

/// alpha^2 = (alpha0^2 / v0^2)[eta'^2 + b0^2 eta^2] with b0 = 1/alpha0^2.
inline double width_from_classical(const ClassicalState& c, double alpha0, double v0)
{
    if (v0 == 0.0 || !std::isfinite(v0))
        throw DomainError("width from the classical trajectory requires v0 != 0");
    const double b0 = 1.0 / (alpha0 * alpha0);
    return alpha0 * alpha0 / (v0 * v0) * (c.eta_dot * c.eta_dot + b0 * b0 * c.eta * c.eta);
}

/// alpha' alpha = (alpha0^2 / v0^2) eta' [b0^2 eta - dV/deta]; V per unit mass.
inline double width_derivative_criterion(const ClassicalState& c, double alpha0, double v0,
                                         double potential_gradient_at_eta)
{
    if (v0 == 0.0 || !std::isfinite(v0))
        throw DomainError("width derivative criterion requires v0 != 0");
    const double b0 = 1.0 / (alpha0 * alpha0);
    return alpha0 * alpha0 / (v0 * v0) * c.eta_dot * (b0 * b0 * c.eta - potential_gradient_at_eta);
}

} // namespace ermakov
