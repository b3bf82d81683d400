#include <gtest/gtest.h>

#include <map>

#include <ermakov/numerov.hpp>
#include <ermakov/stationary.hpp>

#include "support.hpp"

using namespace ermakov;
using testing_support::hermite_function;
using testing_support::hydrogen_radial;
using testing_support::overlap;

namespace {

constexpr double pi = std::numbers::pi;

const PotentialSpec& ho()
{
    static const auto p = PotentialSpec::harmonic(1.0);
    return p;
}

const StationarySolution& ho_level(int n)
{
    static std::map<int, StationarySolution> cache;
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, shoot_eigenvalue(ho(), n)).first;
    return it->second;
}

std::vector<double> physical(const StationarySolution& s)
{
    std::vector<double> q;
    for (double z : s.zeta)
        q.push_back(z / s.k0);
    return q;
}

/// Samples inside the converged amplitude range.
std::vector<double> converged(const StationarySolution& s, const std::vector<double>& v)
{
    const auto [first, last] = converged_range(s);
    return {v.begin() + static_cast<std::ptrdiff_t>(first), v.begin() + static_cast<std::ptrdiff_t>(last)};
}

/// Test-side Numerov for psi'' = -(1 - zeta^2 E0/E) psi in the zeta units of the HO solver (E = 1/2 here).
std::vector<double> numerov_from_origin(double start, double slope, double h, std::size_t steps)
{
    auto k2 = [](double z) { return 1.0 - z * z; };
    std::vector<double> y(steps + 1);
    y[0] = start;
    // Taylor start: y(h) = y0 + h y0' - h^2/2 k2(0) y0 - h^3/6 k2(0) y0'.
    y[1] = start + h * slope - 0.5 * h * h * k2(0.0) * start - h * h * h / 6.0 * k2(0.0) * slope;
    const double c = h * h / 12.0;
    for (std::size_t i = 1; i < steps; ++i) {
        const double zm = (i - 1) * h, z0 = i * h, zp = (i + 1) * h;
        y[i + 1] = (2.0 * (1.0 - 5.0 * c * k2(z0)) * y[i] - (1.0 + c * k2(zm)) * y[i - 1]) / (1.0 + c * k2(zp));
    }
    return y;
}

} // namespace

TEST(Spectrum, AnalyticOracles)
{
    EXPECT_DOUBLE_EQ(ho_eigenvalue(0), 0.5);
    EXPECT_DOUBLE_EQ(coulomb_eigenvalue(0, 0), -0.5);
    EXPECT_NEAR(coulomb_eigenvalue(1, 1), -1.0 / 18.0, 1e-16);
}

TEST(Potential, Validation)
{
    EXPECT_THROW(PotentialSpec::harmonic(0.0), ValidationError);
    EXPECT_THROW(PotentialSpec::coulomb(-1), ValidationError);
    EXPECT_THROW(PotentialSpec::tabulated({0.0, 1.0, 0.5}, {0.0, 1.0, 2.0}), ValidationError);
}

TEST(NonlinearErmakov, EigenvalueIsNotDivergent)
{
    const auto s = solve_nonlinear_ermakov(ho(), 0.5);
    EXPECT_FALSE(s.divergent);
    for (double a : s.a)
        ASSERT_GT(a, 0.0);
}

TEST(NonlinearErmakov, DetunedEnergyDiverges)
{
    const auto s = solve_nonlinear_ermakov(ho(), 0.4);
    EXPECT_TRUE(s.divergent);
    EXPECT_EQ(s.divergence_direction, -1);
    const auto up = solve_nonlinear_ermakov(ho(), 0.6);
    EXPECT_TRUE(up.divergent);
    EXPECT_EQ(up.divergence_direction, +1);
}

TEST(NonlinearErmakov, AmplitudeMatchesNumerovEnvelope)
{
    // a(0) = 1, a'(0) = 0 corresponds to a^2 = u^2 + z^2 with u(0) = 1, u'(0) = 0, z(0) = 0, z'(0) = 1.
    const auto s = solve_nonlinear_ermakov(ho(), 0.5);
    ASSERT_DOUBLE_EQ(s.k0, 1.0);
    const double h = 1e-4;
    const std::size_t steps = 60000;
    const auto u = numerov_from_origin(1.0, 0.0, h, steps);
    const auto z = numerov_from_origin(0.0, 1.0, h, steps);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.zeta.size(); ++i) {
        const double zeta = s.zeta[i];
        if (std::abs(zeta) > 6.0)
            continue;
        // Both solutions have definite parity; evaluate at |zeta|.
        const auto j = static_cast<std::size_t>(std::llround(std::abs(zeta) / h));
        const double env = u[j] * u[j] + z[j] * z[j];
        worst = std::max(worst, std::abs(s.a[i] * s.a[i] - env) / env);
    }
    EXPECT_LT(worst, 1e-4);
}

TEST(Shooting, HarmonicLevels)
{
    for (int n = 0; n <= 2; ++n)
        EXPECT_NEAR(ho_level(n).E, n + 0.5, 1e-6);
}

TEST(Shooting, HarmonicThirdLevelHasThreeNodes)
{
    const auto& s = ho_level(3);
    EXPECT_NEAR(s.E, 3.5, 1e-6);
    EXPECT_EQ(count_nodes(converged(s, reconstruct_linear(s, phase_reference_point(s)))), 3);
    EXPECT_EQ(count_nodes(converged(s, s.reconstructed)), 3);
}

TEST(Shooting, CoulombSWaves)
{
    const auto pot = PotentialSpec::coulomb(0);
    const double exact[] = {-0.5, -0.125, -1.0 / 18.0};
    for (int np = 0; np < 3; ++np)
        EXPECT_NEAR(shoot_eigenvalue(pot, np).E, exact[np], 1e-5);
}

TEST(Shooting, BadBracketIsRejected)
{
    EXPECT_THROW(shoot_eigenvalue(ho(), 0, std::pair{0.6, 3.0}), BracketError);
    EXPECT_THROW(shoot_eigenvalue(ho(), 1, std::pair{0.6, 1.2}), BracketError);
    EXPECT_THROW(shoot_eigenvalue(ho(), 0, std::pair{1.0, 0.2}), ValidationError);
}

TEST(Shooting, AgreesWithNumerovOracle)
{
    for (int n = 0; n <= 5; ++n)
        EXPECT_NEAR(ho_level(n).E, numerov_eigenvalue(ho(), n), 1e-6);
    const auto c = PotentialSpec::coulomb(1);
    for (int np = 0; np < 2; ++np)
        EXPECT_NEAR(shoot_eigenvalue(c, np).E, numerov_eigenvalue(c, np), 1e-6);
}

TEST(MilnePhase, GroundStateFromSymmetryPoint)
{
    EXPECT_NEAR(milne_phase_integral(ho_level(0), 0.0), pi / 2.0, 1e-3);
    EXPECT_NEAR(phase_reference_point(ho_level(0)), 0.0, 1e-6);
}

TEST(MilnePhase, CountFromReferencePoint)
{
    for (int n = 0; n <= 4; ++n) {
        const auto& s = ho_level(n);
        EXPECT_NEAR(milne_phase_integral(s, phase_reference_point(s)), (n + 0.5) * pi, 1e-3);
        // From the far left edge the whole line is covered.
        EXPECT_NEAR(s.phase_integral, (n + 1.0) * pi, 1e-3);
    }
}

TEST(MilnePhase, DetunedEnergyMissesHalfPi)
{
    for (double E : {0.45, 0.55}) {
        const auto s = solve_nonlinear_ermakov(ho(), E);
        EXPECT_GT(std::abs(milne_phase_integral(s, 0.0) - pi / 2.0), 0.05);
    }
}

TEST(Reconstruction, HermiteOverlaps)
{
    for (int n : {0, 2}) {
        const auto& s = ho_level(n);
        const auto rec = reconstruct_linear(s, phase_reference_point(s));
        std::vector<double> exact;
        for (double q : physical(s))
            exact.push_back(hermite_function(n, q));
        EXPECT_GE(overlap(converged(s, rec), converged(s, exact)), 0.999);
    }
    const auto& s2 = ho_level(2);
    EXPECT_EQ(count_nodes(converged(s2, reconstruct_linear(s2, phase_reference_point(s2)))), 2);
}

TEST(Reconstruction, NodesSymmetricForEvenPotential)
{
    const auto& s = ho_level(2);
    const auto rec = reconstruct_linear(s, phase_reference_point(s));
    std::vector<double> nodes;
    for (std::size_t i = 0; i + 1 < rec.size(); ++i)
        if (rec[i] * rec[i + 1] < 0.0 && std::abs(s.zeta[i]) < 5.0)
            nodes.push_back(s.zeta[i] - rec[i] * (s.zeta[i + 1] - s.zeta[i]) / (rec[i + 1] - rec[i]));
    ASSERT_EQ(nodes.size(), 2u);
    EXPECT_NEAR(nodes[0], -nodes[1], 1e-6);
}

TEST(Reconstruction, ConvergedRangeStopsAtAmplitudeLimit)
{
    StationarySolution s;
    EXPECT_THROW(converged_range(s), ValidationError);
    s.a = {1e9, 1e5, 2.0, 1.0, 3.0, 1e7};
    EXPECT_EQ(converged_range(s), (std::pair<std::size_t, std::size_t>{1, 5}));
    const auto& g = ho_level(0);
    const auto [first, last] = converged_range(g);
    EXPECT_LT(hermite_function(0, g.zeta[first] / g.k0), 1e-5);
    EXPECT_LT(hermite_function(0, g.zeta[last - 1] / g.k0), 1e-5);
}

TEST(Reconstruction, DivergentInputIsRejected)
{
    StationarySolution s;
    EXPECT_THROW(reconstruct_linear(s, 0.0), ValidationError);
    s.zeta = {0.0, 1.0, 2.0};
    s.a = {1.0, 1.0, 1.0};
    s.phase = {0.0, 1.0, 2.0};
    EXPECT_THROW(reconstruct_linear(s, 0.0), NumericError);
    EXPECT_THROW(milne_phase_integral(s, 0.0), NumericError);
}

TEST(Madelung, ResidualsOnFirstExcitedState)
{
    const auto r = madelung_residuals(ho_level(1), ho());
    EXPECT_LT(r.hamilton_jacobi, 1e-4);
    EXPECT_LT(r.continuity, 1e-4);
}

TEST(Madelung, ResidualsConvergeQuadratically)
{
    auto residual = [](double dz) {
        StationaryConfig cfg;
        cfg.dzeta = dz;
        cfg.zeta_span = std::pair{-4.0, 4.0};
        return madelung_residuals(solve_nonlinear_ermakov(ho(), 1.5, std::nullopt, cfg), ho()).hamilton_jacobi;
    };
    const double ratio = residual(8e-3) / residual(4e-3);
    EXPECT_GT(ratio, 3.5);
    EXPECT_LT(ratio, 4.5);
}

TEST(Madelung, RealBranchHasNoFlux)
{
    const auto r = madelung_residuals(ho_level(0), ho(), MadelungBranch::real_wave);
    EXPECT_EQ(r.continuity, 0.0);
    EXPECT_LT(r.hamilton_jacobi, 1e-4);
}

TEST(SpatialRiccati, ReconstructedEigenfunctionsSatisfyIt)
{
    for (int n = 0; n <= 3; ++n) {
        const auto& s = ho_level(n);
        EXPECT_LT(spatial_riccati_residual(s, ho(), eigenfunction(s).psi), 1e-3) << "n = " << n;
    }
}

TEST(Reconstruction, CoulombOverlaps)
{
    struct Case
    {
        int n, l;
    };
    for (const auto [n, l] : {Case{1, 0}, Case{2, 0}, Case{2, 1}}) {
        const auto pot = PotentialSpec::coulomb(l);
        const auto s = shoot_eigenvalue(pot, n - l - 1);
        const auto rec = reconstruct_linear(s, phase_reference_point(s));
        std::vector<double> exact;
        for (double r : physical(s))
            exact.push_back(hydrogen_radial(n, l, r));
        EXPECT_GE(overlap(converged(s, rec), converged(s, exact)), 0.999) << "n = " << n << ", l = " << l;
    }
}
