#include <gtest/gtest.h>

#include <ermakov/invariant.hpp>

#include "support.hpp"

using namespace ermakov;
using testing_support::rel_err;

TEST(Invariant, HarmonicTrigIdentity)
{
    for (double t : {0.0, 0.7, 2.0, 5.5})
        EXPECT_NEAR(ermakov_invariant({std::sin(t), std::cos(t), t}, {1.0, 0.0, t}), 0.5, 1e-15);
}

TEST(Invariant, VanishesAtRest)
{
    EXPECT_EQ(ermakov_invariant({0.0, 0.0, 0.0}, {1.3, 0.2, 0.0}), 0.0);
    EXPECT_EQ(invariant_bilinear({0.0, 0.0, 0.0}, Uncertainties{}), 0.0);
    const auto f = factorize({0.0, 0.0, 0.0}, {Complex(0.2, 0.9)});
    EXPECT_EQ(std::abs(f.A), 0.0);
}

TEST(Invariant, BilinearGroundStateExample)
{
    for (double t : {0.0, 1.0, 3.0})
        EXPECT_NEAR(invariant_bilinear({std::sin(t), std::cos(t), t}, {0.5, 0.5, 0.0}), 0.5, 1e-15);
}

TEST(Invariant, BilinearMatchesWidthForm)
{
    for (double a : {0.4, 1.0, 2.2})
        for (double ad : {-0.9, 0.0, 0.6})
            for (double eta : {-1.3, 0.5})
                for (double v : {-0.2, 1.7}) {
                    const ClassicalState c{eta, v, 0.0};
                    const ErmakovState e{a, ad, 0.0};
                    const double direct = ermakov_invariant(c, e);
                    EXPECT_LT(rel_err(invariant_bilinear(c, uncertainties_from_width(e)), direct), 1e-12);
                }
}

TEST(Invariant, BilinearWithUnitsCarriesMOverHbar)
{
    const UnitSystem units{0.3, 2.5};
    const ClassicalState c{0.7, -0.4, 0.0};
    const ErmakovState e{1.3, 0.5, 0.0};
    // The bilinear form is unit-free; the m/hbar factor lives in the unit-carrying variant.
    EXPECT_LT(rel_err(invariant_bilinear(c, uncertainties_from_width(e, units), units), ermakov_invariant(c, e)), 1e-12);
    EXPECT_LT(rel_err(invariant_with_units(c, e, units), units.mass / units.hbar * ermakov_invariant(c, e)), 1e-15);
}

TEST(Uncertainties, Examples)
{
    const auto g = uncertainties_from_width(ErmakovState{1.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(g.xx, 0.5);
    EXPECT_DOUBLE_EQ(g.pp, 0.5);
    EXPECT_DOUBLE_EQ(g.xp, 0.0);
    const auto w = uncertainties_from_width(ErmakovState{2.0, 0.0, 0.0});
    EXPECT_DOUBLE_EQ(w.xx, 2.0);
    EXPECT_DOUBLE_EQ(w.pp, 0.125);
    EXPECT_DOUBLE_EQ(w.xx * w.pp, 0.25);
    const auto c = uncertainties_from_width(ErmakovState{1.0, 1.0, 0.0});
    EXPECT_DOUBLE_EQ(c.xp, 1.0);
    EXPECT_DOUBLE_EQ(c.pp, 1.0);
    EXPECT_NEAR(c.robertson_schroedinger(), 0.25, 1e-15);
}

TEST(Uncertainties, RobertsonSchroedingerEquality)
{
    for (const UnitSystem units : {UnitSystem{}, UnitSystem{0.2, 3.0}})
        for (double a : {0.3, 1.0, 4.0})
            for (double ad : {-2.0, 0.0, 0.7}) {
                const auto u = uncertainties_from_width(ErmakovState{a, ad, 0.0}, units);
                EXPECT_LT(rel_err(u.robertson_schroedinger(), 0.25 * units.hbar * units.hbar), 1e-13);
            }
}

TEST(Uncertainties, RiccatiAndErmakovFormsAgree)
{
    const ErmakovState e{1.6, -0.3, 0.4};
    const auto r = riccati_from_lambda(lambda_from_ermakov(e));
    const auto a = uncertainties_from_width(e), b = uncertainties_from_width(r);
    EXPECT_NEAR(a.xx, b.xx, 1e-14);
    EXPECT_NEAR(a.pp, b.pp, 1e-14);
    EXPECT_NEAR(a.xp, b.xp, 1e-14);
}

TEST(Factorization, HarmonicNormalMode)
{
    const double w = 1.4;
    const ClassicalState c{0.3, 0.8, 0.0};
    const auto f = factorize(c, {Complex(0.0, w)});
    EXPECT_NEAR(std::abs(f.A - Complex(c.eta_dot, -w * c.eta)), 0.0, 1e-15);
    EXPECT_EQ(f.A_star, std::conj(f.A));
}

TEST(Factorization, IdentityOnPaulTrapTrajectory)
{
    const auto p = FrequencyProfile::parametric(1.0, 0.2, 2.0);
    const TimeGrid g{0.0, 40.0, 201};
    const ErmakovState e0{1.2, 0.3, 0.0};
    const auto cl = integrate_classical(p, {0.5, -0.7}, g);
    const auto ri = integrate_riccati(p, riccati_from_lambda(lambda_from_ermakov(e0)), g);
    const auto er = integrate_ermakov(p, e0, g);
    for (std::size_t i = 0; i < g.samples; ++i) {
        const auto& r = ri.states[i];
        const auto f = factorize(cl[i], r);
        const ErmakovState e{1.0 / std::sqrt(r.Y.imag()), r.Y.real() / std::sqrt(r.Y.imag()), 0.0};
        EXPECT_LT(rel_err(invariant_from_factors(f, r), ermakov_invariant(cl[i], e)), 1e-12);
        EXPECT_LT(rel_err(invariant_from_factors(f, r), ermakov_invariant(cl[i], er.states[i])), 1e-6);
    }
}

TEST(Invariant, ZFormMatchesDirectForm)
{
    const auto p = FrequencyProfile::parametric(1.0, 0.2, 2.0);
    const double a0 = 1.3, p0 = 0.9;
    const UnitSystem units{1.0, 1.0};
    const TimeGrid g{0.0, 30.0, 151};
    const auto cl = integrate_classical(p, {0.0, p0 / units.mass}, g);
    const auto er = integrate_ermakov(p, {a0, 0.0, 0.0}, g);
    for (std::size_t i = 0; i < g.samples; ++i) {
        const double scale = units.mass / (a0 * p0);
        const double direct = ermakov_invariant(cl[i], er.states[i]);
        const double zform = ermakov_invariant_from_z(scale * cl[i].eta, scale * cl[i].eta_dot, er.states[i], a0, p0, units);
        EXPECT_LT(rel_err(zform, direct), 1e-9);
    }
}

TEST(Invariant, ConservedForBuiltInProfiles)
{
    std::vector<double> tt, ww;
    for (int i = 0; i <= 2000; ++i) {
        tt.push_back(0.05 * i);
        ww.push_back(1.0 + 0.3 * std::sin(0.4 * tt.back()));
    }
    const std::vector<FrequencyProfile> profiles{FrequencyProfile::free(), FrequencyProfile::constant(1.3),
                                                 FrequencyProfile::parametric(1.0, 0.2, 2.0),
                                                 FrequencyProfile::tabulated(tt, ww)};
    const TimeGrid g{0.0, 100.0, 1001};
    for (const auto& p : profiles) {
        const auto cl = integrate_classical(p, {0.7, 0.3}, g);
        const auto er = integrate_ermakov(p, {1.1, -0.2, 0.0}, g);
        const double i0 = ermakov_invariant(cl[0], er.states[0]);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.samples; ++i)
            worst = std::max(worst, rel_err(ermakov_invariant(cl[i], er.states[i]), i0));
        EXPECT_LT(worst, 1e-7);
    }
}
