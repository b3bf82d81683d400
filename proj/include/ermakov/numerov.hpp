#pragma once

// Numerov integration of psi'' + kappa psi = 0 in a Dirichlet box, used as an
// independent node-count oracle and eigenvalue reference for the Milne solver.

#include <cmath>
#include <vector>

#include "potential.hpp"

namespace ermakov {

struct NumerovBox
{
    double q_min = 0.0;
    double q_max = 1.0;
    double h = 1e-3;
    bool regular_origin = false;
    int l = 0;
};

struct NumerovOptions
{
    /// Grid spacing in units of the natural length (oscillator length or Bohr radius).
    double relative_step = 2e-3;
    double energy_tol = 1e-12;
};

namespace numerov_detail {

inline double natural_length(const PotentialSpec& pot)
{
    const double hb = pot.units().hbar, m = pot.units().mass;
    if (auto h = std::get_if<HarmonicPotential>(&pot.kind()))
        return std::sqrt(hb / (m * h->omega));
    if (auto c = std::get_if<CoulombPotential>(&pot.kind()))
        return hb * hb / (m * c->e2);
    return hb / std::sqrt(2.0 * m * pot.energy_scale());
}

} // namespace numerov_detail

/// Box wide enough that the eigenfunctions near E have decayed at the walls.
inline NumerovBox numerov_box(const PotentialSpec& pot, double E, const NumerovOptions& opt = {})
{
    const double hb = pot.units().hbar, m = pot.units().mass;
    const double len = numerov_detail::natural_length(pot);
    NumerovBox box;
    box.h = opt.relative_step * len;
    const auto [ql, qr] = pot.turning_points(E);
    if (std::holds_alternative<HarmonicPotential>(pot.kind())) {
        box.q_min = ql - 10.0 * len;
        box.q_max = qr + 10.0 * len;
    } else if (std::holds_alternative<CoulombPotential>(pot.kind())) {
        const double decay = E < 0.0 ? hb / std::sqrt(2.0 * m * -E) : 50.0 * len;
        box.q_min = 0.0;
        box.q_max = std::min((std::isfinite(qr) ? qr : 0.0) + 15.0 * decay + 10.0 * len, 4000.0 * len);
        box.regular_origin = true;
        box.l = pot.regular_l();
    } else {
        const auto& tab = std::get<TabulatedPotential>(pot.kind());
        const double width = tab.v.x_max() - tab.v.x_min();
        const double pad = std::max(15.0 * len, 0.5 * width);
        box.regular_origin = tab.boundary == Boundary::half_line_regular;
        box.l = tab.l_eff;
        box.q_min = box.regular_origin ? tab.v.x_min() : std::min(ql, tab.v.x_min()) - pad;
        box.q_max = std::max(qr, tab.v.x_max()) + pad;
        box.h = std::min(box.h, width * 1e-3);
    }
    return box;
}

/// Number of interior sign changes of the solution that satisfies the left
/// boundary condition; equals the number of box eigenvalues below E.
inline int numerov_node_count(const PotentialSpec& pot, double E, const NumerovBox& box,
                              std::vector<double>* samples = nullptr)
{
    const double h = box.h;
    const auto n = static_cast<std::size_t>(std::ceil((box.q_max - box.q_min) / h));
    const double h2 = h * h / 12.0;
    auto weight = [&](std::size_t i) { return 1.0 + h2 * pot.kappa(E, box.q_min + h * static_cast<double>(i)); };

    double prev, cur;
    std::size_t start;
    if (box.regular_origin) {
        // psi(0) = 0 is excluded; series data at h and 2h.
        const double c1 = -pot.units().mass / (pot.units().hbar * pot.units().hbar) *
                          (std::holds_alternative<CoulombPotential>(pot.kind())
                               ? std::get<CoulombPotential>(pot.kind()).e2
                               : 0.0) /
                          (box.l + 1);
        auto series = [&](double r) { return std::pow(r, box.l + 1) * (1.0 + c1 * r); };
        prev = series(box.q_min + h);
        cur = series(box.q_min + 2.0 * h);
        start = 2;
    } else {
        prev = 0.0;
        cur = 1e-20;
        start = 1;
    }
    if (samples) {
        samples->assign(1, 0.0);
        if (box.regular_origin)
            samples->push_back(prev);
        samples->push_back(cur);
    }
    int nodes = 0;
    double w_prev = weight(start - 1), w_cur = weight(start);
    for (std::size_t i = start; i < n; ++i) {
        const double w_next = weight(i + 1);
        const double next = (2.0 * cur * (1.0 - 5.0 * (w_cur - 1.0)) - prev * w_prev) / w_next;
        if ((next < 0.0 && cur > 0.0) || (next > 0.0 && cur < 0.0))
            ++nodes;
        prev = cur;
        cur = next;
        w_prev = w_cur;
        w_cur = w_next;
        if (std::abs(cur) > 1e150) {
            prev *= 1e-150;
            cur *= 1e-150;
            if (samples)
                for (auto& s : *samples)
                    s *= 1e-150;
        }
        if (samples)
            samples->push_back(cur);
    }
    return nodes;
}

inline int numerov_node_count(const PotentialSpec& pot, double E, const NumerovOptions& opt = {})
{
    return numerov_node_count(pot, E, numerov_box(pot, E, opt));
}

/// Bracket [lo, hi] with count(lo) <= n < count(hi).
inline std::pair<double, double> numerov_bracket(const PotentialSpec& pot, int n, const NumerovOptions& opt = {})
{
    if (n < 0)
        throw ValidationError("quantum number must be >= 0");
    const double scale = pot.energy_scale();
    const bool coulomb = std::holds_alternative<CoulombPotential>(pot.kind());
    double lo, hi;
    if (coulomb) {
        const int l = pot.regular_l();
        lo = 4.0 * coulomb_eigenvalue(0, l, std::get<CoulombPotential>(pot.kind()).e2, pot.units());
        hi = lo;
        for (int k = 0; k < 200 && numerov_node_count(pot, hi, opt) <= n; ++k)
            hi *= 0.5;
    } else {
        lo = pot.minimum_value();
        double step = scale;
        hi = lo + step;
        for (int k = 0; k < 200 && numerov_node_count(pot, hi, opt) <= n; ++k) {
            step *= 2.0;
            hi = lo + step;
        }
    }
    if (numerov_node_count(pot, hi, opt) <= n)
        throw BracketError("no bracket found for level " + std::to_string(n));
    return {lo, hi};
}

/// n-th eigenvalue by bisection on the node count.
inline double numerov_eigenvalue(const PotentialSpec& pot, int n, const NumerovOptions& opt = {})
{
    auto [lo, hi] = numerov_bracket(pot, n, opt);
    const auto box = numerov_box(pot, hi, opt);
    while (hi - lo > opt.energy_tol * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi)
            break;
        (numerov_node_count(pot, mid, box) <= n ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace ermakov
