#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace ermakov {

enum class IntegrationMethod { adaptive_rk45, fixed_rk4 };

struct IntegratorConfig
{
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    /// Upper bound on the adaptive step; the step size itself for fixed RK4.
    double max_step = std::numeric_limits<double>::infinity();
    IntegrationMethod method = IntegrationMethod::adaptive_rk45;

    void validate() const
    {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
            throw ValidationError("integrator tolerances must be positive");
        if (!(max_step > 0.0))
            throw ValidationError("integrator max_step must be positive");
        if (method == IntegrationMethod::fixed_rk4 && !std::isfinite(max_step))
            throw ValidationError("fixed RK4 needs a finite max_step (the step size)");
    }
};

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct OdeSolution
{
    std::vector<double> t;
    std::vector<Vec<N>> y;
    /// True if the stop predicate ended the integration before the last output time.
    bool stopped = false;
    double t_end = 0.0;
    Vec<N> y_end{};
    std::size_t steps = 0;
};

namespace ode_detail {

template <std::size_t N>
inline Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms)
{
    Vec<N> out = y;
    for (const auto& [c, k] : terms) {
        if (c == 0.0)
            continue;
        for (std::size_t i = 0; i < N; ++i)
            out[i] += h * c * (*k)[i];
    }
    return out;
}

struct NoStop
{
    template <class Y>
    bool operator()(double, const Y&) const noexcept
    {
        return false;
    }
};

} // namespace ode_detail

/// Integrates y' = f(t, y) from (t0, y0) and records the state at each entry
/// of `times` (monotone, all on one side of t0; integration runs backwards if
/// they precede t0).  Adaptive steps are clamped so that every output time is
/// hit exactly.  `stop(t, y)` is polled after each accepted step.
template <std::size_t N, class Rhs, class Stop = ode_detail::NoStop>
OdeSolution<N> integrate_ode(Rhs&& f, double t0, const Vec<N>& y0, std::span<const double> times,
                             const IntegratorConfig& cfg, Stop&& stop = {},
                             const std::string& module = "core_model")
{
    cfg.validate();
    OdeSolution<N> sol;
    sol.t.reserve(times.size());
    sol.y.reserve(times.size());

    double t = t0;
    Vec<N> y = y0;
    if (times.empty()) {
        sol.t_end = t;
        sol.y_end = y;
        return sol;
    }
    const double dir = (times.back() >= t0) ? 1.0 : -1.0;
    const double span = std::abs(times.back() - t0);

    auto finish = [&](bool stopped) {
        sol.stopped = stopped;
        sol.t_end = t;
        sol.y_end = y;
        return sol;
    };

    if (cfg.method == IntegrationMethod::fixed_rk4) {
        for (double target : times) {
            const double delta = target - t;
            const auto n = static_cast<std::size_t>(std::ceil(std::abs(delta) / cfg.max_step - 1e-12));
            const double h = n ? delta / static_cast<double>(n) : 0.0;
            for (std::size_t s = 0; s < n; ++s) {
                const Vec<N> k1 = f(t, y);
                const Vec<N> k2 = f(t + 0.5 * h, ode_detail::axpy<N>(y, h, {{0.5, &k1}}));
                const Vec<N> k3 = f(t + 0.5 * h, ode_detail::axpy<N>(y, h, {{0.5, &k2}}));
                const Vec<N> k4 = f(t + h, ode_detail::axpy<N>(y, h, {{1.0, &k3}}));
                y = ode_detail::axpy<N>(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
                t = (s + 1 == n) ? target : t + h;
                ++sol.steps;
                if (stop(t, y))
                    return finish(true);
            }
            sol.t.push_back(target);
            sol.y.push_back(y);
        }
        return finish(false);
    }

    // Dormand-Prince 5(4), FSAL.
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    double h = std::min(cfg.max_step, std::max(span, 1e-300) * 1e-3);
    Vec<N> k1 = f(t, y);
    std::size_t next = 0;
    while (next < times.size() && dir * (times[next] - t) <= 0.0) {
        sol.t.push_back(times[next]);
        sol.y.push_back(y);
        ++next;
    }
    constexpr std::size_t max_steps = 200'000'000;

    while (next < times.size()) {
        const double target = times[next];
        double step = std::min(h, cfg.max_step);
        bool clamped = false;
        if (step >= std::abs(target - t)) {
            step = std::abs(target - t);
            clamped = true;
        }
        const double hs = dir * step;

        const Vec<N> k2 = f(t + hs / 5, ode_detail::axpy<N>(y, hs, {{a21, &k1}}));
        const Vec<N> k3 = f(t + 3 * hs / 10, ode_detail::axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = f(t + 4 * hs / 5, ode_detail::axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 =
            f(t + 8 * hs / 9, ode_detail::axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 = f(t + hs, ode_detail::axpy<N>(
                                        y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y5 =
            ode_detail::axpy<N>(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const double t_new = clamped ? target : t + hs;
        const Vec<N> k7 = f(t_new, y5);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / sc);
            finite = finite && std::isfinite(y5[i]);
        }
        if (!finite)
            err = std::numeric_limits<double>::infinity();

        if (err <= 1.0) {
            t = t_new;
            y = y5;
            k1 = k7;
            ++sol.steps;
            if (stop(t, y))
                return finish(true);
            if (clamped) {
                sol.t.push_back(target);
                sol.y.push_back(y);
                ++next;
            }
            const double fac = (err == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            // A clamped step says nothing about the natural step length; keep h.
            if (!clamped || step >= h)
                h = step * fac;
        } else {
            const double fac = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9) : 0.1;
            h = step * fac;
        }
        if (h < 1e-15 * std::max(1.0, std::abs(t)))
            throw StepFailure(module, t, "step size underflow, tolerance unreachable");
        if (sol.steps > max_steps)
            throw StepFailure(module, t, "step budget exhausted");
    }
    return finish(false);
}

/// Uniformly spaced sample times t0, ..., t1 (inclusive), `samples` >= 2.
inline std::vector<double> linspace(double t0, double t1, std::size_t samples)
{
    std::vector<double> out(samples);
    for (std::size_t i = 0; i < samples; ++i)
        out[i] = (i + 1 == samples) ? t1
                                    : t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(samples - 1);
    return out;
}

} // namespace ermakov
