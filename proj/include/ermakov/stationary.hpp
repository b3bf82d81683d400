#pragma once

// Stationary states through the phase-amplitude (Milne) form psi = a sin(phi),
// phi' = 1 / a^2, with a'' + kappa a = 1 / a^3.  Results are reported in the
// scaled coordinate zeta = k0 q, k0 = sqrt(2 m |E|) / hbar, where the amplitude
// equation reads a'' + (1 - V/E) a = 1 / a^3 (E > 0) and the phase integral is
// unchanged.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include "numerov.hpp"
#include "potential.hpp"

namespace ermakov {

struct StationaryConfig
{
    IntegratorConfig integrator{1e-12, 1e-12};
    /// Output spacing in zeta.
    double dzeta = 1e-3;
    /// The amplitude grows exponentially in forbidden regions; integration
    /// stops once it exceeds this value (zeta units).
    double amplitude_cap = 1e12;
    /// Amplitude at which the reconstructed solution is probed for divergence.
    double divergence_amplitude = 1e6;
    /// Inner boundary for half-line problems (zeta units).
    double zeta_min = 1e-6;
    /// Integration span in zeta; defaults to [-12, 12] (full line) or (0, 50]
    /// (half line), widened to cover 2 zeta_turning + 20.
    std::optional<std::pair<double, double>> zeta_span;
    /// Bisection stops when the bracket is below this fraction of max(|E|, energy scale).
    double energy_tol = 1e-10;
    /// Reconstructed |psi| at the probe point above which the run counts as divergent.
    double divergence_threshold = 1.0;
    NumerovOptions numerov{};
};

/// Start data in zeta units; by default the local WKB amplitude
/// kappa^{-1/4} at the deepest point of the potential is used.
struct MilneStart
{
    double zeta = 0.0;
    double a = 1.0;
    double a_dot = 0.0;
};

struct StationarySolution
{
    double E = 0.0;
    double k0 = 1.0;
    /// Phase-law constant of grad S = C / a^2, fixed to hbar.
    double C = 1.0;
    UnitSystem units{};
    bool half_line = false;
    int quantum_number = -1;

    std::vector<double> zeta;
    std::vector<double> a;
    std::vector<double> a_dot;
    /// Accumulated phase measured from the left boundary (offset included).
    std::vector<double> phase;
    /// a sin(phase), i.e. a cos(int_{zeta0} dzeta / a^2) with phase(zeta0) = pi/2.
    std::vector<double> reconstructed;

    /// Total phase from the left boundary to +infinity (tails included).
    double phase_integral = 0.0;
    double left_offset = 0.0;
    double right_tail = 0.0;
    /// Phase from the last sample to +infinity, kept separately to avoid cancellation.
    double right_remainder = 0.0;
    /// Amplitude cap reached at the outer ends, so the tail phases are asymptotic.
    bool tails_resolved = false;
    bool divergent = false;
    /// +1 when E lies above the nearest eigenvalue (psi leaves with the sign of
    /// the last lobe flipped), -1 when below.
    int divergence_direction = 0;
    double zeta_left_end = 0.0;
    double zeta_right_end = 0.0;
    double a_right_end = 0.0;
    double a_dot_right_end = 0.0;
    double a_left_end = 0.0;
    double a_dot_left_end = 0.0;

    double h() const noexcept { return zeta.size() > 1 ? zeta[1] - zeta[0] : 0.0; }
};

namespace stationary_detail {

struct Run
{
    std::vector<double> q;
    std::vector<Vec<3>> y;
    double q_end = 0.0;
    Vec<3> y_end{};
    bool capped = false;
};

inline Run run(const PotentialSpec& pot, double E, double q_start, const Vec<3>& y0, double q_limit, double hq,
               double a_cap, const IntegratorConfig& cfg)
{
    Run out;
    std::vector<double> times;
    const double dir = q_limit >= q_start ? 1.0 : -1.0;
    if (hq > 0.0) {
        const auto K = static_cast<std::size_t>(std::floor(std::abs(q_limit - q_start) / hq + 1e-9));
        times.reserve(K);
        for (std::size_t k = 1; k <= K; ++k)
            times.push_back(q_start + dir * hq * static_cast<double>(k));
    }
    // The span edge is always an output so that dense and sparse runs end alike.
    const bool edge_extra = times.empty() || times.back() != q_limit;
    if (edge_extra)
        times.push_back(q_limit);
    auto rhs = [&](double q, const Vec<3>& y) {
        const double a = y[0];
        const double inv2 = 1.0 / (a * a);
        return Vec<3>{y[1], -pot.kappa(E, q) * a + inv2 / a, inv2};
    };
    auto stop = [&](double q, const Vec<3>& y) {
        if (!(y[0] > 0.0) || !std::isfinite(y[0]))
            throw NumericError("stationary", "Milne amplitude collapsed at q = " + std::to_string(q));
        return y[0] > a_cap;
    };
    auto sol = integrate_ode<3>(rhs, q_start, y0, times, cfg, stop, "stationary");
    out.q = std::move(sol.t);
    out.y = std::move(sol.y);
    out.q_end = sol.t_end;
    out.y_end = sol.y_end;
    out.capped = sol.stopped;
    if (edge_extra && !sol.stopped && !out.q.empty()) {
        out.q.pop_back();
        out.y.pop_back();
    }
    return out;
}

/// Regular solution q^{l+1}(1 + c1 q) near the origin; returns f / f'.
inline double regular_ratio(const PotentialSpec& pot, double r)
{
    const int l = pot.regular_l();
    double c1 = 0.0;
    if (auto c = std::get_if<CoulombPotential>(&pot.kind()))
        c1 = -pot.units().mass * c->e2 / (pot.units().hbar * pot.units().hbar) / (l + 1);
    return r * (1.0 + c1 * r) / ((l + 1) + (l + 2) * c1 * r);
}

inline double phase_at_index_interp(const StationarySolution& s, double zeta)
{
    const double h = s.h();
    if (s.zeta.size() < 2 || zeta < s.zeta.front() - 1e-12 * h || zeta > s.zeta.back() + 1e-12 * h)
        throw RangeError("zeta outside the sampled span of the solution");
    auto i = static_cast<std::size_t>(std::clamp((zeta - s.zeta.front()) / h, 0.0,
                                                 static_cast<double>(s.zeta.size() - 2)));
    const double t = (zeta - s.zeta[i]) / h;
    // Cubic Hermite with phase' = 1 / a^2.
    const double p0 = s.phase[i], p1 = s.phase[i + 1];
    const double m0 = h / (s.a[i] * s.a[i]), m1 = h / (s.a[i + 1] * s.a[i + 1]);
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
}

/// Corrected trapezoid for int 1/a^2 between samples i and i+1 (zeta units).
inline double phase_increment(const StationarySolution& s, std::size_t i)
{
    const double h = s.h();
    const double f0 = 1.0 / (s.a[i] * s.a[i]), f1 = 1.0 / (s.a[i + 1] * s.a[i + 1]);
    const double d0 = -2.0 * s.a_dot[i] * f0 / s.a[i], d1 = -2.0 * s.a_dot[i + 1] * f1 / s.a[i + 1];
    return 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
}

} // namespace stationary_detail

/// Default zeta span, widened so that the forbidden tails fit.
inline std::pair<double, double> default_zeta_span(const PotentialSpec& pot, double E, double k0)
{
    const auto [ql, qr] = pot.turning_points(E);
    if (pot.half_line()) {
        const double zt = std::isfinite(qr) ? k0 * qr : 0.0;
        return {0.0, std::max(50.0, 2.0 * zt + 20.0)};
    }
    double lo = -12.0, hi = 12.0;
    if (auto t = std::get_if<TabulatedPotential>(&pot.kind())) {
        const double w = t->v.x_max() - t->v.x_min();
        lo = std::min(lo, k0 * (t->v.x_min() - w));
        hi = std::max(hi, k0 * (t->v.x_max() + w));
    }
    lo = std::min(lo, 2.0 * k0 * std::min(ql, 0.0) - 20.0);
    hi = std::max(hi, 2.0 * k0 * std::max(qr, 0.0) + 20.0);
    return {lo, hi};
}

/// Integrates the amplitude equation outwards in both directions from the
/// start point until the amplitude cap or the span edge.  With `dense` false
/// only the end data and the phase integral are produced.
inline StationarySolution solve_nonlinear_ermakov(const PotentialSpec& pot, double E,
                                                  const std::optional<MilneStart>& start = std::nullopt,
                                                  const StationaryConfig& cfg = {}, bool dense = true)
{
    if (!std::isfinite(E))
        throw ValidationError("energy must be finite");
    if (!(cfg.dzeta > 0.0) || !(cfg.amplitude_cap > 0.0) || !(cfg.zeta_min > 0.0))
        throw ValidationError("stationary config requires dzeta, amplitude_cap, zeta_min > 0");
    const UnitSystem& u = pot.units();
    const double hb = u.hbar, m = u.mass;

    StationarySolution s;
    s.E = E;
    s.units = u;
    s.C = hb;
    s.half_line = pot.half_line();
    s.k0 = E != 0.0 ? std::sqrt(2.0 * m * std::abs(E)) / hb : 1.0;
    const double k0 = s.k0, rk = std::sqrt(k0);

    double q_s, a_q, ad_q;
    if (start) {
        if (!(start->a > 0.0))
            throw ValidationError("Milne start amplitude must be positive");
        q_s = start->zeta / k0;
        a_q = start->a / rk;
        ad_q = start->a_dot * rk;
    } else {
        q_s = pot.deepest_point(E);
        const double kap = pot.kappa(E, q_s);
        if (kap > 0.0) {
            const double dkap = -2.0 * m / (hb * hb) * pot.derivative(q_s);
            a_q = std::pow(kap, -0.25);
            ad_q = -0.25 * std::pow(kap, -1.25) * dkap;
        } else {
            a_q = 1.0 / rk;
            ad_q = 0.0;
        }
    }

    auto span = cfg.zeta_span ? *cfg.zeta_span : default_zeta_span(pot, E, k0);
    double q_left = span.first / k0, q_right = span.second / k0;
    if (s.half_line) {
        double inner = cfg.zeta_min / k0;
        if (auto t = std::get_if<TabulatedPotential>(&pot.kind()))
            inner = std::max(inner, t->v.x_min());
        q_left = std::max(q_left, inner);
    }
    if (!(q_s > q_left && q_s < q_right))
        throw ValidationError("Milne start point outside the integration span");

    const double hq = dense ? cfg.dzeta / k0 : 0.0;
    const double a_cap = cfg.amplitude_cap / rk;
    const Vec<3> y0{a_q, ad_q, 0.0};
    const auto R = stationary_detail::run(pot, E, q_s, y0, q_right, hq, a_cap, cfg.integrator);
    const auto L = stationary_detail::run(pot, E, q_s, y0, q_left, hq, a_cap, cfg.integrator);

    // Phase from the left boundary at the left end point.
    const double aL = L.y_end[0], adL = L.y_end[1];
    bool left_ok = L.capped;
    if (s.half_line) {
        const double r = L.q_end;
        const double ratio = stationary_detail::regular_ratio(pot, r);
        s.left_offset = std::atan2(ratio, aL * (aL - ratio * adL));
        left_ok = true;
    } else {
        s.left_offset = adL < 0.0 ? 1.0 / (2.0 * aL * -adL) : 0.0;
    }
    const double aR = R.y_end[0], adR = R.y_end[1];
    s.right_tail = adR > 0.0 ? 1.0 / (2.0 * aR * adR) : 0.0;
    s.tails_resolved = left_ok && R.capped && adR > 0.0;
    const double thetaL = L.y_end[2];
    s.phase_integral = s.left_offset + (R.y_end[2] - thetaL) + s.right_tail;

    s.zeta_left_end = k0 * L.q_end;
    s.zeta_right_end = k0 * R.q_end;
    s.a_left_end = aL * rk;
    s.a_dot_left_end = adL / rk;
    s.a_right_end = aR * rk;
    s.a_dot_right_end = adR / rk;

    const double Theta = s.phase_integral;
    const double probe = std::min(s.a_right_end, cfg.divergence_amplitude);
    s.divergent = probe * std::abs(std::sin(Theta)) > cfg.divergence_threshold || !s.tails_resolved;
    s.divergence_direction = std::fmod(Theta, std::numbers::pi) < 0.5 * std::numbers::pi ? +1 : -1;

    if (!dense)
        return s;
    s.right_remainder = (R.y_end[2] - (R.y.empty() ? 0.0 : R.y.back()[2])) + s.right_tail;

    const std::size_t nL = L.q.size(), nR = R.q.size();
    s.zeta.reserve(nL + nR + 1);
    auto push = [&](double q, const Vec<3>& y) {
        s.zeta.push_back(k0 * q);
        s.a.push_back(y[0] * rk);
        s.a_dot.push_back(y[1] / rk);
        s.phase.push_back(s.left_offset + (y[2] - thetaL));
    };
    for (std::size_t i = nL; i-- > 0;)
        push(L.q[i], L.y[i]);
    push(q_s, y0);
    for (std::size_t i = 0; i < nR; ++i)
        push(R.q[i], R.y[i]);
    s.reconstructed.resize(s.zeta.size());
    for (std::size_t i = 0; i < s.zeta.size(); ++i)
        s.reconstructed[i] = s.a[i] * std::sin(s.phase[i]);
    return s;
}

/// Phase accumulated from the left boundary at zeta (cubic Hermite between samples).
inline double phase_at(const StationarySolution& sol, double zeta)
{
    return stationary_detail::phase_at_index_interp(sol, zeta);
}

/// First zeta at which the phase from the left boundary reaches pi/2; the
/// reference point of reconstruct_linear (zeta = 0 for even HO states).
inline double phase_reference_point(const StationarySolution& sol)
{
    const double target = 0.5 * std::numbers::pi;
    for (std::size_t i = 0; i + 1 < sol.phase.size(); ++i) {
        if (sol.phase[i] <= target && sol.phase[i + 1] >= target) {
            double lo = sol.zeta[i], hi = sol.zeta[i + 1];
            for (int k = 0; k < 60; ++k) {
                const double mid = 0.5 * (lo + hi);
                (phase_at(sol, mid) < target ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
    throw NumericError("stationary", "phase never reaches pi/2 on the sampled span");
}

namespace stationary_detail {

inline void require_phase(const StationarySolution& sol)
{
    if (sol.zeta.empty())
        throw ValidationError("solution carries no samples");
    if (!sol.tails_resolved)
        throw NumericError("stationary", "phase undefined: amplitude never reached the asymptotic regime");
}

} // namespace stationary_detail

/// int_{zeta0}^{infinity} dzeta / a^2, i.e. the argument of the cosine in the
/// reconstruction referenced at zeta0.
inline double milne_phase_integral(const StationarySolution& sol, double zeta0)
{
    stationary_detail::require_phase(sol);
    return sol.phase_integral - phase_at(sol, zeta0);
}

/// a(zeta) cos(int_{zeta0}^{zeta} dzeta' / a^2).
inline std::vector<double> reconstruct_linear(const StationarySolution& sol, double zeta0)
{
    stationary_detail::require_phase(sol);
    const double p0 = phase_at(sol, zeta0);
    std::vector<double> out(sol.zeta.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = sol.a[i] * std::cos(sol.phase[i] - p0);
    return out;
}

/// Index range [first, last) around the amplitude minimum where a <= limit.
/// Beyond it the reconstruction is dominated by the exponentially growing
/// partner solution: an energy error dE is amplified by a^2 there.
inline std::pair<std::size_t, std::size_t> converged_range(const StationarySolution& sol, double amplitude_limit = 1e6)
{
    if (sol.a.empty())
        throw ValidationError("solution carries no samples");
    const auto lowest = static_cast<std::size_t>(std::min_element(sol.a.begin(), sol.a.end()) - sol.a.begin());
    std::size_t first = lowest, last = lowest + 1;
    while (first > 0 && sol.a[first - 1] <= amplitude_limit)
        --first;
    while (last < sol.a.size() && sol.a[last] <= amplitude_limit)
        ++last;
    return {first, last};
}

struct Eigenfunction
{
    std::vector<double> psi;
    /// psi' / psi in zeta units, from the amplitude data (no differencing).
    std::vector<double> log_derivative;
};

/// Eigenfunction referenced to the left boundary on the left half and to the
/// right boundary on the right half, so both decaying tails keep full
/// relative accuracy.  Phases are re-accumulated outwards from each end.
inline Eigenfunction eigenfunction(const StationarySolution& sol)
{
    stationary_detail::require_phase(sol);
    const std::size_t n = sol.zeta.size();
    std::vector<double> from_left(n), from_right(n);
    from_left[0] = sol.phase[0];
    for (std::size_t i = 0; i + 1 < n; ++i)
        from_left[i + 1] = from_left[i] + stationary_detail::phase_increment(sol, i);
    // Remaining phase beyond the last sample: the piece up to the end point plus the asymptotic tail.
    from_right[n - 1] = sol.right_remainder;
    for (std::size_t i = n - 1; i-- > 0;)
        from_right[i] = from_right[i + 1] + stationary_detail::phase_increment(sol, i);

    const int nodes = std::max(0, static_cast<int>(std::lround(sol.phase_integral / std::numbers::pi)) - 1);
    const double sign = (nodes % 2 == 0) ? 1.0 : -1.0;
    const double half = 0.5 * sol.phase_integral;
    Eigenfunction ef;
    ef.psi.resize(n);
    ef.log_derivative.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sol.a[i], ad = sol.a_dot[i];
        if (sol.phase[i] <= half) {
            ef.psi[i] = a * std::sin(from_left[i]);
            ef.log_derivative[i] = ad / a + 1.0 / (a * a * std::tan(from_left[i]));
        } else {
            ef.psi[i] = sign * a * std::sin(from_right[i]);
            ef.log_derivative[i] = ad / a - 1.0 / (a * a * std::tan(from_right[i]));
        }
    }
    return ef;
}

/// Sign changes of sampled values; lobes whose peak is below `min_lobe`
/// times the global peak are merged into their neighbours.
inline int count_nodes(std::span<const double> f, double min_lobe = 1e-3)
{
    struct Lobe
    {
        int sign;
        double peak;
    };
    std::vector<Lobe> lobes;
    double peak = 0.0;
    for (double v : f) {
        peak = std::max(peak, std::abs(v));
        if (v == 0.0)
            continue;
        const int sg = v > 0.0 ? 1 : -1;
        if (lobes.empty() || lobes.back().sign != sg)
            lobes.push_back({sg, 0.0});
        lobes.back().peak = std::max(lobes.back().peak, std::abs(v));
    }
    int nodes = 0, last = 0;
    for (const auto& l : lobes) {
        if (l.peak < min_lobe * peak)
            continue;
        if (last != 0 && l.sign != last)
            ++nodes;
        last = l.sign;
    }
    return nodes;
}

/// Locates eigenvalue n (node count; radial nodes n' for half-line problems)
/// by bisection on the sign of Theta(E) - (n+1) pi, Theta the total Milne
/// phase.  Without a bracket one is taken from the Numerov node counts.
inline StationarySolution shoot_eigenvalue(const PotentialSpec& pot, int n,
                                           std::optional<std::pair<double, double>> bracket = std::nullopt,
                                           const StationaryConfig& cfg = {})
{
    if (n < 0)
        throw ValidationError("quantum number must be >= 0");
    double lo, hi;
    if (bracket) {
        std::tie(lo, hi) = *bracket;
        if (!(hi > lo))
            throw ValidationError("energy bracket requires hi > lo");
    } else {
        // Midpoints to the neighbouring Numerov levels.
        const double En = numerov_eigenvalue(pot, n, cfg.numerov);
        const double Eup = numerov_eigenvalue(pot, n + 1, cfg.numerov);
        hi = 0.5 * (En + Eup);
        lo = n > 0 ? 0.5 * (numerov_eigenvalue(pot, n - 1, cfg.numerov) + En) : numerov_bracket(pot, 0, cfg.numerov).first;
    }
    const auto box = numerov_box(pot, hi, cfg.numerov);
    const int c_lo = numerov_node_count(pot, lo, box), c_hi = numerov_node_count(pot, hi, box);
    if (c_lo != n || c_hi != n + 1)
        throw BracketError("bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "] holds " +
                           std::to_string(c_hi - c_lo) + " eigenvalues around level " + std::to_string(n) +
                           " (node counts " + std::to_string(c_lo) + ", " + std::to_string(c_hi) + ")");

    const double target = (n + 1) * std::numbers::pi;
    auto residual = [&](double E) {
        return solve_nonlinear_ermakov(pot, E, std::nullopt, cfg, false).phase_integral - target;
    };
    double f_lo = residual(lo), f_hi = residual(hi);
    if (!(f_lo < 0.0 && f_hi > 0.0))
        throw BracketError("Milne phase does not change sign across the bracket for level " + std::to_string(n));
    const double scale = pot.energy_scale();
    while (hi - lo > cfg.energy_tol * std::max(std::abs(0.5 * (lo + hi)), scale)) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        const double f = residual(mid);
        if (f < 0.0) {
            lo = mid;
            f_lo = f;
        } else {
            hi = mid;
            f_hi = f;
        }
    }
    // Linear interpolation inside the final bracket.
    const double E = (f_hi - f_lo) > 0.0 ? lo - f_lo * (hi - lo) / (f_hi - f_lo) : 0.5 * (lo + hi);
    auto sol = solve_nonlinear_ermakov(pot, E, std::nullopt, cfg, true);
    sol.quantum_number = n;
    return sol;
}

/// kappa / k0^2 at the sample points.
inline std::vector<double> scaled_kappa(const StationarySolution& sol, const PotentialSpec& pot)
{
    std::vector<double> out(sol.zeta.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = pot.kappa(sol.E, sol.zeta[i] / sol.k0) / (sol.k0 * sol.k0);
    return out;
}

enum class MadelungBranch {
    /// grad S = C / a^2 with C = hbar: the Milne amplitude.
    phase_amplitude,
    /// grad S = 0: the real eigenfunction is the amplitude.
    real_wave,
};

struct MadelungResiduals
{
    double hamilton_jacobi = 0.0;
    double continuity = 0.0;
};

/// Max-norm finite-difference residuals of
///   a''/a + kappa - (C/hbar)^2 / a^4 = 0   and   (a^2 S')' = 0
/// (zeta units), skipping samples with zeta < zeta_exclude and, for the real
/// branch, 3-point neighbourhoods of nodes.
inline MadelungResiduals madelung_residuals(const StationarySolution& sol, const PotentialSpec& pot,
                                            MadelungBranch branch = MadelungBranch::phase_amplitude,
                                            double zeta_exclude = -std::numeric_limits<double>::infinity())
{
    const std::size_t n = sol.zeta.size();
    if (n < 5)
        throw ValidationError("too few samples for Madelung residuals");
    const double h = sol.h();
    const auto kap = scaled_kappa(sol, pot);
    MadelungResiduals r;
    if (branch == MadelungBranch::phase_amplitude) {
        const double c2 = (sol.C / sol.units.hbar) * (sol.C / sol.units.hbar);
        std::vector<double> flux(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i)
            flux[i] = sol.a[i] * sol.a[i] *
                      (stationary_detail::phase_increment(sol, i - 1) + stationary_detail::phase_increment(sol, i)) /
                      (2.0 * h);
        for (std::size_t i = 2; i + 2 < n; ++i) {
            if (sol.zeta[i] < zeta_exclude)
                continue;
            const double a = sol.a[i];
            const double app = (sol.a[i + 1] - 2.0 * a + sol.a[i - 1]) / (h * h);
            r.hamilton_jacobi = std::max(r.hamilton_jacobi, std::abs(app / a + kap[i] - c2 / (a * a * a * a)));
            r.continuity = std::max(r.continuity, std::abs((flux[i + 1] - flux[i - 1]) / (2.0 * h)));
        }
        return r;
    }
    const auto ef = eigenfunction(sol);
    double peak = 0.0;
    for (double v : ef.psi)
        peak = std::max(peak, std::abs(v));
    for (std::size_t i = 3; i + 3 < n; ++i) {
        if (sol.zeta[i] < zeta_exclude)
            continue;
        bool near_node = false;
        for (std::size_t j = i - 3; j < i + 3; ++j)
            near_node = near_node || (ef.psi[j] * ef.psi[j + 1] <= 0.0);
        if (near_node || std::abs(ef.psi[i]) < 1e-6 * peak)
            continue;
        const double app = (ef.psi[i + 1] - 2.0 * ef.psi[i] + ef.psi[i - 1]) / (h * h);
        r.hamilton_jacobi = std::max(r.hamilton_jacobi, std::abs(app / ef.psi[i] + kap[i]));
    }
    // S is constant on this branch: the flux vanishes identically.
    r.continuity = 0.0;
    return r;
}

/// Max-norm residual of (psi'/psi)' + (psi'/psi)^2 + kappa (zeta units),
/// skipping 3-point neighbourhoods of nodes and samples where
/// |psi| < 1e-6 max |psi|.  With the one-sided logarithmic differences
///   g+ = (psi[i+1] - psi[i]) / (h psi[i]),  g- = (psi[i] - psi[i-1]) / (h psi[i])
/// the quotient (g+ - g-) / h equals g' + g^2 to second order in h and,
/// unlike a centered difference of psi'/psi, stays regular next to nodes.
inline double spatial_riccati_residual(const StationarySolution& sol, const PotentialSpec& pot,
                                       std::span<const double> psi,
                                       double zeta_exclude = -std::numeric_limits<double>::infinity())
{
    const std::size_t n = sol.zeta.size();
    if (psi.size() != n)
        throw ValidationError("eigenfunction samples must match the solution grid");
    const double h = sol.h();
    const auto kap = scaled_kappa(sol, pot);
    double peak = 0.0;
    for (double v : psi)
        peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 3; i + 3 < n; ++i) {
        if (sol.zeta[i] < zeta_exclude)
            continue;
        bool skip = false;
        for (std::size_t j = i - 3; j < i + 3; ++j)
            skip = skip || (psi[j] * psi[j + 1] <= 0.0) || std::abs(psi[j]) < 1e-6 * peak;
        if (skip)
            continue;
        const double gp = (psi[i + 1] - psi[i]) / (h * psi[i]);
        const double gm = (psi[i] - psi[i - 1]) / (h * psi[i]);
        worst = std::max(worst, std::abs((gp - gm) / h + kap[i]));
    }
    return worst;
}

} // namespace ermakov
