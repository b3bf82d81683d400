#include <gtest/gtest.h>

#include <ermakov/propagation.hpp>
#include <ermakov/wigner.hpp>

#include "support.hpp"

using namespace ermakov;
using testing_support::rel_err;

namespace {

constexpr double pi = std::numbers::pi;

WignerGaussian ground()
{
    return {0.0, 0.0, {0.5, 0.5, 0.0}, {}};
}

std::vector<WignerSample> coherent_packet(double dt, double t1 = 1.0)
{
    const auto n = static_cast<std::size_t>(std::llround(t1 / dt)) + 1;
    return wigner_trajectory(FrequencyProfile::constant(1.0), {0.8, 0.3}, {1.0, 0.0, 0.0}, TimeGrid{0.0, t1, n});
}

PhaseSpaceGrid phase_grid(double step)
{
    PhaseSpaceGrid g;
    for (double x = -1.0; x <= 2.5; x += 0.25)
        g.x.push_back(x);
    for (double p = -1.5; p <= 1.5; p += 0.25)
        g.p.push_back(p);
    g.dx = g.dp = step;
    return g;
}

} // namespace

TEST(Wigner, PeakValue)
{
    const WignerGaussian w{0.4, -0.2, {0.5, 0.5, 0.0}, {}};
    EXPECT_DOUBLE_EQ(wigner_eval(w, 0.4, -0.2), 1.0 / pi);
    const WignerGaussian h{0.0, 0.0, {0.5 * 0.3, 0.5 * 0.3, 0.0}, {0.3, 1.0}};
    EXPECT_DOUBLE_EQ(wigner_eval(h, 0.0, 0.0), 1.0 / (pi * 0.3));
}

TEST(Wigner, GroundStateOffCentre)
{
    EXPECT_NEAR(wigner_eval(ground(), 1.0, 0.0), std::exp(-1.0) / pi, 1e-16);
}

TEST(Wigner, Normalization)
{
    EXPECT_NEAR(wigner_integral(ground()), 1.0, 1e-6);
    const auto samples = wigner_trajectory(FrequencyProfile::parametric(1.0, 0.2, 2.0), {1.0, 0.0}, {0.7, 0.4, 0.0},
                                           TimeGrid{0.0, 50.0, 26});
    for (const auto& s : samples) {
        s.w.validate();
        EXPECT_NEAR(wigner_integral(s.w), 1.0, 1e-6) << "t = " << s.t;
    }
}

TEST(Wigner, Purity)
{
    for (double a : {0.5, 1.0, 2.5})
        for (double ad : {-1.0, 0.0, 0.5}) {
            const auto w = wigner_from_state({0.0, 0.0, 0.0}, {a, ad, 0.0}, {0.7, 1.3});
            EXPECT_NEAR(w.purity_determinant(), 1.0, 1e-13);
        }
    const WignerGaussian mixed{0.0, 0.0, {1.0, 1.0, 0.0}, {}};
    EXPECT_THROW(mixed.validate(), ValidationError);
}

TEST(Wigner, OriginAtRest)
{
    EXPECT_DOUBLE_EQ(wigner_origin({0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}), 1.0 / pi);
}

TEST(Wigner, OriginOnHarmonicTrajectory)
{
    for (double t : {0.0, 1.0, 2.5, 6.0})
        EXPECT_NEAR(wigner_origin({std::sin(t), std::cos(t), t}, {1.0, 0.0, t}), std::exp(-1.0) / pi, 1e-15);
}

TEST(Wigner, OriginMatchesEvaluation)
{
    const UnitSystem units{0.6, 1.7};
    const ClassicalState c{0.4, -0.9, 0.0};
    const ErmakovState e{1.3, 0.25, 0.0};
    const auto w = wigner_from_state(c, e, units);
    EXPECT_LT(rel_err(wigner_eval(w, 0.0, 0.0), wigner_origin(c, e, units)), 1e-12);
}

TEST(Wigner, OriginConstantOnPaulTrap)
{
    const auto p = FrequencyProfile::parametric(1.0, 0.2, 2.0);
    const TimeGrid g{0.0, 50.0, 501};
    const auto cl = integrate_classical(p, {0.6, 0.4}, g);
    const auto er = integrate_ermakov(p, {0.9, 0.1, 0.0}, g);
    const double w0 = wigner_origin(cl[0], er.states[0]);
    for (std::size_t i = 0; i < g.samples; ++i)
        ASSERT_LT(rel_err(wigner_origin(cl[i], er.states[i]), w0), 1e-6);
}

TEST(Wigner, MarginalMatchesPropagatedDensity)
{
    const auto prof = FrequencyProfile::parametric(1.0, 0.2, 2.0);
    const double a0 = 1.2, p0 = 0.7, t = 3.7;
    const SpatialGrid grid{-10.0, 10.0, 801};
    const auto k = kernel_params(prof, a0, t);
    const auto res = propagate_quadrature(k, InitialPacket{a0, p0}, grid);
    const auto samples =
        wigner_trajectory(prof, {0.0, p0}, {a0, 0.0, 0.0}, TimeGrid{0.0, t, 2});
    const auto marg = wigner_position_marginal(samples.back().w, res.x);
    double s = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
        const double d = marg[i] - std::norm(res.psi[i]);
        s += d * d * grid.dx();
    }
    EXPECT_LT(std::sqrt(s), 1e-5);
}

TEST(Liouville, StaticGroundStateHasNoResidual)
{
    const auto traj = wigner_trajectory(FrequencyProfile::constant(1.0), {0.0, 0.0}, {1.0, 0.0, 0.0},
                                        TimeGrid{0.0, 1.0, 101});
    const auto r = liouville_residual(traj, FrequencyProfile::constant(1.0), phase_grid(1e-3));
    EXPECT_LT(r.residual, 1e-6);
}

TEST(Liouville, CoherentPacketResidualIsSmall)
{
    const auto r = liouville_residual(coherent_packet(1e-3), FrequencyProfile::constant(1.0), phase_grid(1e-3));
    EXPECT_LT(r.residual, 1e-4);
    EXPECT_FALSE(r.coarse_sampling);
}

TEST(Liouville, SecondOrderConvergence)
{
    const auto prof = FrequencyProfile::constant(1.0);
    const double coarse = liouville_residual(coherent_packet(2e-2), prof, phase_grid(2e-2)).residual;
    const double fine = liouville_residual(coherent_packet(1e-2), prof, phase_grid(1e-2)).residual;
    EXPECT_GT(coarse / fine, 3.5);
    EXPECT_LT(coarse / fine, 4.5);
}

TEST(Liouville, CoarseSamplingIsFlagged)
{
    const auto r = liouville_residual(coherent_packet(0.1), FrequencyProfile::constant(1.0), phase_grid(0.2));
    EXPECT_TRUE(r.coarse_sampling);
}

TEST(Liouville, RejectsBadInput)
{
    const auto traj = coherent_packet(0.1);
    EXPECT_THROW(liouville_residual(std::span(traj).first(2), FrequencyProfile::constant(1.0), phase_grid(1e-3)),
                 ValidationError);
    PhaseSpaceGrid empty;
    EXPECT_THROW(liouville_residual(traj, FrequencyProfile::constant(1.0), empty), ValidationError);
}
