#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace testing_support {

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

/// Normalized Hermite-Gauss function, hbar = m = omega = 1.
inline double hermite_function(int n, double x)
{
    double norm = std::pow(std::numbers::pi, -0.25);
    for (int k = 1; k <= n; ++k)
        norm /= std::sqrt(2.0 * k);
    return norm * std::hermite(static_cast<unsigned>(n), x) * std::exp(-0.5 * x * x);
}

/// Unnormalized hydrogen radial functions r R_{nl}(r) in atomic units.
inline double hydrogen_radial(int n, int l, double r)
{
    if (n == 1 && l == 0)
        return 2.0 * r * std::exp(-r);
    if (n == 2 && l == 0)
        return r * (1.0 - 0.5 * r) * std::exp(-0.5 * r);
    if (n == 2 && l == 1)
        return r * r * std::exp(-0.5 * r);
    // General form r^{l+1} e^{-r/n} L_{n-l-1}^{2l+1}(2r/n).
    return std::pow(r, l + 1) * std::exp(-r / n) *
           std::assoc_laguerre(static_cast<unsigned>(n - l - 1), static_cast<unsigned>(2 * l + 1), 2.0 * r / n);
}

/// |<f, g>| / (|f| |g|) on a common uniform grid.
inline double overlap(std::span<const double> f, std::span<const double> g)
{
    double fg = 0.0, ff = 0.0, gg = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        fg += f[i] * g[i];
        ff += f[i] * f[i];
        gg += g[i] * g[i];
    }
    return std::abs(fg) / std::sqrt(ff * gg);
}

/// Classical RK4 with fixed step for y'' = -w2(t) y; returns (y, y').
template <class W2>
inline std::pair<double, double> rk4_oscillator(W2 w2, double y, double yd, double t0, double t1, double dt)
{
    const auto steps = static_cast<long>(std::llround((t1 - t0) / dt));
    const double h = (t1 - t0) / static_cast<double>(steps);
    double t = t0;
    for (long i = 0; i < steps; ++i) {
        const double k1y = yd, k1v = -w2(t) * y;
        const double k2y = yd + 0.5 * h * k1v, k2v = -w2(t + 0.5 * h) * (y + 0.5 * h * k1y);
        const double k3y = yd + 0.5 * h * k2v, k3v = -w2(t + 0.5 * h) * (y + 0.5 * h * k2y);
        const double k4y = yd + h * k3v, k4v = -w2(t + h) * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        yd += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += h;
    }
    return {y, yd};
}

} // namespace testing_support
