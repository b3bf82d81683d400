#include <gtest/gtest.h>

#include <ermakov/susy.hpp>

#include "support.hpp"

using namespace ermakov;
using testing_support::hermite_function;
using testing_support::overlap;

namespace {

std::vector<double> grid(double lo, double hi, std::size_t n) { return linspace(lo, hi, n); }

int sign_changes(std::span<const double> f, double floor)
{
    int n = 0, last = 0;
    for (double v : f) {
        if (std::abs(v) < floor)
            continue;
        const int s = v > 0.0 ? 1 : -1;
        if (last != 0 && s != last)
            ++n;
        last = s;
    }
    return n;
}

double commutator_residual(std::size_t points)
{
    const auto q = grid(-5.0, 5.0, points);
    std::vector<double> psi, W, Wp;
    for (double x : q) {
        psi.push_back((1.0 + 0.2 * x) * std::exp(-0.5 * x * x));
        W.push_back(x + 0.3 * x * x * x);
        Wp.push_back(1.0 + 0.9 * x * x);
    }
    const auto up = apply_ladder(LadderDirection::raise, psi, W, q);
    const auto down = apply_ladder(LadderDirection::lower, psi, W, q);
    const auto down_up = apply_ladder(LadderDirection::lower, up, W, q);
    const auto up_down = apply_ladder(LadderDirection::raise, down, W, q);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < q.size(); ++i)
        worst = std::max(worst, std::abs(down_up[i] - up_down[i] - Wp[i] * psi[i]));
    return worst;
}

} // namespace

TEST(Superpotential, HarmonicGroundState)
{
    const double w = 1.3;
    const auto q = grid(-6.0, 6.0, 1201);
    std::vector<double> psi;
    for (double x : q)
        psi.push_back(std::exp(-0.5 * w * x * x));
    const auto W = superpotential_from_state(psi, q);
    for (std::size_t i = 0; i < q.size(); ++i)
        EXPECT_NEAR(W[i], w * q[i], 1e-8);
    for (std::size_t i = 0; i < q.size(); ++i)
        EXPECT_NEAR(W[i], -W[q.size() - 1 - i], 1e-9);
}

TEST(Superpotential, CoulombGroundState)
{
    const auto r = grid(0.5, 20.0, 19501);
    std::vector<double> psi;
    for (double x : r)
        psi.push_back(x * std::exp(-x));
    const auto W = superpotential_from_state(psi, r);
    for (std::size_t i = 1; i + 1 < r.size(); ++i)
        ASSERT_NEAR(W[i], 1.0 - 1.0 / r[i], 1e-5);
}

TEST(Superpotential, NodeIsRejected)
{
    const auto q = grid(-3.0, 3.0, 61);
    std::vector<double> psi;
    for (double x : q)
        psi.push_back(x * std::exp(-0.5 * x * x) + 1e-3);
    EXPECT_THROW(superpotential_from_state(psi, q), DomainError);
}

TEST(Partners, Harmonic)
{
    const double w = 0.8;
    const auto q = grid(-5.0, 5.0, 1001);
    std::vector<double> W;
    for (double x : q)
        W.push_back(w * x);
    const auto p = partner_potentials(W, q);
    for (std::size_t i = 0; i < q.size(); ++i) {
        EXPECT_NEAR(p.V1[i], 0.5 * w * w * q[i] * q[i] - 0.5 * w, 1e-12);
        EXPECT_NEAR(p.V2[i], 0.5 * w * w * q[i] * q[i] + 0.5 * w, 1e-12);
        EXPECT_NEAR(p.V2[i] - p.V1[i], w, 1e-12);
    }
}

TEST(Partners, CoulombFirstPartnerIsShiftedPotential)
{
    const auto r = grid(0.5, 20.0, 19501);
    std::vector<double> W;
    for (double x : r)
        W.push_back(1.0 - 1.0 / x);
    const auto p = partner_potentials(W, r);
    const auto pot = PotentialSpec::coulomb(0);
    for (std::size_t i = 1; i + 1 < r.size(); ++i)
        ASSERT_NEAR(p.V1[i], pot.value(r[i]) + 0.5, 1e-5);
}

TEST(Ladder, RaisingPartnerGroundGivesFirstExcited)
{
    const auto q = grid(-8.0, 8.0, 1601);
    std::vector<double> psi, W, psi1;
    for (double x : q) {
        psi.push_back(hermite_function(0, x));
        W.push_back(x);
        psi1.push_back(hermite_function(1, x));
    }
    EXPECT_GE(overlap(apply_ladder(LadderDirection::raise, psi, W, q), psi1), 0.999);
    const auto gone = apply_ladder(LadderDirection::lower, psi, W, q);
    double norm = 0.0;
    for (double v : gone)
        norm += v * v * (q[1] - q[0]);
    EXPECT_LT(std::sqrt(norm), 1e-4);
}

TEST(Ladder, RaisingAddsExactlyOneNode)
{
    const auto q = grid(-8.0, 8.0, 1601);
    std::vector<double> W(q.begin(), q.end());
    for (int n = 0; n <= 4; ++n) {
        std::vector<double> psi;
        for (double x : q)
            psi.push_back(hermite_function(n, x));
        const auto up = apply_ladder(LadderDirection::raise, psi, W, q);
        EXPECT_EQ(sign_changes(up, 1e-8), sign_changes(psi, 1e-8) + 1) << "n = " << n;
    }
}

TEST(Ladder, CommutatorIsSecondOrder)
{
    const double coarse = commutator_residual(501), fine = commutator_residual(1001);
    EXPECT_LT(fine, 1e-3);
    EXPECT_GT(coarse / fine, 3.5);
    EXPECT_LT(coarse / fine, 4.5);
}

TEST(Hierarchy, HarmonicThreeLevels)
{
    const auto levels = susy_hierarchy(PotentialSpec::harmonic(1.0), 3);
    ASSERT_EQ(levels.size(), 3u);
    for (int s = 0; s < 3; ++s) {
        EXPECT_NEAR(levels[s].original_energy, s + 0.5, 1e-5);
        EXPECT_EQ(levels[s].ground_energy, 0.0);
    }
}

TEST(Hierarchy, LevelsSatisfyPartnerRelations)
{
    const auto pot = PotentialSpec::harmonic(1.0);
    const auto levels = susy_hierarchy(pot, 2);
    for (const auto& L : levels)
        for (std::size_t i = 0; i < L.q.size(); ++i) {
            ASSERT_NEAR(L.V2[i] - L.V1[i], L.W_prime[i], 1e-10);
            ASSERT_NEAR(L.V1[i], 0.5 * (L.W[i] * L.W[i] - L.W_prime[i]), 1e-10);
        }
    const auto next = next_level_potential(pot, levels[0]);
    for (std::size_t i = 0; i < levels[0].q.size(); i += 97)
        EXPECT_NEAR(next.value(levels[0].q[i]) - levels[0].potential[i], levels[0].W_prime[i], 1e-9);
    // The first superpotential of the oscillator is W = q.
    for (std::size_t i = 0; i < levels[0].q.size(); i += 97)
        EXPECT_NEAR(levels[0].W[i], levels[0].q[i], 1e-6);
}

TEST(Hierarchy, ZeroModeResidual)
{
    const auto levels = susy_hierarchy(PotentialSpec::harmonic(1.0), 2);
    for (const auto& L : levels) {
        const double h = L.q[1] - L.q[0];
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < L.q.size(); ++i) {
            const double d2 = (L.ground_state[i + 1] - 2.0 * L.ground_state[i] + L.ground_state[i - 1]) / (h * h);
            worst = std::max(worst, std::abs(-0.5 * d2 + L.V1[i] * L.ground_state[i]));
        }
        EXPECT_LT(worst, 1e-4) << "level " << L.s;
    }
}

TEST(Hierarchy, PartnerSpectraAreDegenerate)
{
    const auto pot = PotentialSpec::harmonic(1.0);
    const auto levels = susy_hierarchy(pot, 1);
    const auto partner = next_level_potential(pot, levels[0]);
    for (int k = 0; k < 3; ++k)
        EXPECT_NEAR(shoot_eigenvalue(partner, k).E, shoot_eigenvalue(pot, k + 1).E, 1e-5) << "k = " << k;
}

TEST(Hierarchy, CoulombTwoLevels)
{
    const auto levels = susy_hierarchy(PotentialSpec::coulomb(0), 2);
    EXPECT_NEAR(levels[0].original_energy, -0.5, 1e-4);
    EXPECT_NEAR(levels[1].original_energy, -0.125, 1e-4);
}

TEST(Hierarchy, NeedsAtLeastOneLevel)
{
    EXPECT_THROW(susy_hierarchy(PotentialSpec::harmonic(1.0), 0), ValidationError);
}
