#pragma once

// Superpotential, partner potentials, ladder operators
//   B+- = (1/sqrt 2)(W -+ (hbar/sqrt m) d/dq)
// and the hierarchy of Hamiltonians whose ground states give the excited
// spectrum of the original problem.  All samples here are in physical q.

#include <cmath>
#include <span>
#include <vector>

#include "stationary.hpp"

namespace ermakov {

namespace susy_detail {

inline void require_uniform(std::span<const double> q, std::size_t n)
{
    if (q.size() != n || n < 3)
        throw ValidationError("samples must match a grid of at least 3 points");
}

/// Centered differences, second-order one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> f, std::span<const double> q)
{
    const std::size_t n = f.size();
    require_uniform(q, n);
    const double h = q[1] - q[0];
    std::vector<double> d(n);
    for (std::size_t i = 1; i + 1 < n; ++i)
        d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

inline double susy_scale(const UnitSystem& u) { return u.hbar / std::sqrt(u.mass); }

} // namespace susy_detail

/// W = -(hbar / sqrt m) d ln(psi0) / dq by centered differences.
inline std::vector<double> superpotential_from_state(std::span<const double> ground, std::span<const double> q,
                                                     const UnitSystem& units = {})
{
    susy_detail::require_uniform(q, ground.size());
    const double sgn = ground[ground.size() / 2] < 0.0 ? -1.0 : 1.0;
    std::vector<double> logs(ground.size());
    for (std::size_t i = 0; i < ground.size(); ++i) {
        const double v = sgn * ground[i];
        if (!(v > 0.0))
            throw DomainError("ground state has a node at q = " + std::to_string(q[i]));
        logs[i] = std::log(v);
    }
    auto W = susy_detail::derivative(logs, q);
    for (auto& w : W)
        w *= -susy_detail::susy_scale(units);
    return W;
}

struct PartnerPotentials
{
    std::vector<double> V1;
    std::vector<double> V2;
};

/// V1,2 = 1/2 [W^2 -+ (hbar / sqrt m) W'] with centered-difference W'.
inline PartnerPotentials partner_potentials(std::span<const double> W, std::span<const double> q,
                                            const UnitSystem& units = {})
{
    const auto dW = susy_detail::derivative(W, q);
    const double c = susy_detail::susy_scale(units);
    PartnerPotentials p{std::vector<double>(W.size()), std::vector<double>(W.size())};
    for (std::size_t i = 0; i < W.size(); ++i) {
        p.V1[i] = 0.5 * (W[i] * W[i] - c * dW[i]);
        p.V2[i] = 0.5 * (W[i] * W[i] + c * dW[i]);
    }
    return p;
}

enum class LadderDirection { raise, lower };

/// B+ psi (raise) or B- psi (lower) by centered differences; the 1/sqrt(E)
/// normalization is left to the caller.
inline std::vector<double> apply_ladder(LadderDirection dir, std::span<const double> psi, std::span<const double> W,
                                        std::span<const double> q, const UnitSystem& units = {})
{
    if (W.size() != psi.size())
        throw ValidationError("psi and W must share the grid");
    const auto d = susy_detail::derivative(psi, q);
    const double c = susy_detail::susy_scale(units) * (dir == LadderDirection::raise ? -1.0 : 1.0);
    std::vector<double> out(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i)
        out[i] = (W[i] * psi[i] + c * d[i]) / std::sqrt(2.0);
    return out;
}

struct SusyLevel
{
    int s = 1;
    /// Physical grid of this level.
    std::vector<double> q;
    std::vector<double> W;
    std::vector<double> W_prime;
    std::vector<double> V1;
    std::vector<double> V2;
    /// U_s = V1 + E_s on the grid.
    std::vector<double> potential;
    /// Ground-state energy of H1 at this level (zero by construction of V1).
    double ground_energy = 0.0;
    /// The same level on the original energy scale, E_{s-1} of the first Hamiltonian.
    double original_energy = 0.0;
    /// Ground state of U_s, normalized on the grid.
    std::vector<double> ground_state;
};

/// Builds the level from the shooting solution of its ground state.  W and
/// W' use the exact amplitude data: W = -(hbar/sqrt m) psi'/psi and
/// W' = (hbar/sqrt m)(kappa + (psi'/psi)^2).  The grid keeps the samples
/// where |psi| exceeds `cutoff` times its peak.
inline SusyLevel susy_level(const PotentialSpec& pot, const StationarySolution& ground, int s, double cutoff = 1e-9)
{
    const auto ef = eigenfunction(ground);
    const std::size_t n = ef.psi.size();
    double peak = 0.0;
    std::size_t ipeak = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(ef.psi[i]) > peak) {
            peak = std::abs(ef.psi[i]);
            ipeak = i;
        }
    std::size_t lo = ipeak, hi = ipeak;
    // Skip the first samples of half-line problems, where the centrifugal wall is unresolved.
    const std::size_t first = ground.half_line ? 10 : 0;
    while (lo > first && std::abs(ef.psi[lo - 1]) > cutoff * peak)
        --lo;
    while (hi + 1 < n && std::abs(ef.psi[hi + 1]) > cutoff * peak)
        ++hi;

    const double c = susy_detail::susy_scale(pot.units());
    const double sgn = ef.psi[ipeak] < 0.0 ? -1.0 : 1.0;
    SusyLevel L;
    L.s = s;
    L.original_energy = ground.E;
    L.ground_energy = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        const double q = ground.zeta[i] / ground.k0;
        const double g = ef.log_derivative[i] * ground.k0;
        const double w = -c * g;
        const double wp = c * (pot.kappa(ground.E, q) + g * g);
        L.q.push_back(q);
        L.W.push_back(w);
        L.W_prime.push_back(wp);
        L.V1.push_back(0.5 * (w * w - c * wp));
        L.V2.push_back(0.5 * (w * w + c * wp));
        L.potential.push_back(pot.value(q));
        L.ground_state.push_back(sgn * ef.psi[i]);
    }
    if (L.q.size() < 16)
        throw NumericError("stationary", "ground state too poorly resolved for the SUSY level");
    double norm = 0.0;
    const double h = L.q[1] - L.q[0];
    for (std::size_t i = 0; i < L.q.size(); ++i)
        norm += ((i == 0 || i + 1 == L.q.size()) ? 0.5 : 1.0) * h * L.ground_state[i] * L.ground_state[i];
    for (auto& v : L.ground_state)
        v /= std::sqrt(norm);
    return L;
}

/// Tabulated potential U_s + (hbar/sqrt m) W_s' of the next level.  Beyond
/// the grid it continues linearly, which cannot open spurious wells.
inline PotentialSpec next_level_potential(const PotentialSpec& pot, const SusyLevel& level)
{
    const double c = susy_detail::susy_scale(pot.units());
    std::vector<double> v(level.q.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = level.potential[i] + c * level.W_prime[i];
    return PotentialSpec::tabulated(level.q, std::move(v),
                                    pot.half_line() ? Boundary::half_line_regular : Boundary::full_line,
                                    pot.half_line() ? pot.regular_l() + 1 : 0, pot.units(),
                                    CubicSpline::Extrapolation::linear);
}

/// Levels s = 1..levels; the ground state of level s is solved by
/// shoot_eigenvalue on U_s and reproduces E_{s-1} of the original problem.
inline std::vector<SusyLevel> susy_hierarchy(const PotentialSpec& pot, int levels, const StationaryConfig& cfg = {})
{
    if (levels < 1)
        throw ValidationError("SUSY hierarchy needs at least one level");
    std::vector<SusyLevel> out;
    PotentialSpec current = pot;
    for (int s = 1; s <= levels; ++s) {
        const auto ground = shoot_eigenvalue(current, 0, std::nullopt, cfg);
        out.push_back(susy_level(current, ground, s));
        if (s < levels)
            current = next_level_potential(current, out.back());
    }
    return out;
}

} // namespace ermakov
