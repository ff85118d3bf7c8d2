#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <sstream>

#include <Eigen/Dense>

#include "lpx/stability.hpp"

using namespace lpx;

namespace {

// Exact Laplacian of the cat's eye: lap u = exp(-2u) since a^2 - (a^2 - 1) = 1.
double catseye_exact(double a, double x, double y) { return std::log(a * std::cosh(y) + std::sqrt(a * a - 1) * std::cos(x)); }

} // namespace

TEST(Stability, LaplacianIsSecondOrderOnSmoothFields)
{
    // u = sin(x) cos(y / 2) with lap u = -5/4 u; boundary rows are one-sided
    std::vector<double> errs;
    for (std::size_t n : {32, 64, 128}) {
        FieldGrid u(n, n, 2.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) u.at(i, j) = std::sin(u.x(i)) * std::cos(u.y(j) / 2);
        FieldGrid L = laplacian(u);
        double e = 0;
        for (std::size_t k = 0; k < u.values.size(); ++k) e = std::max(e, std::abs(L.values[k] + 1.25 * u.values[k]));
        errs.push_back(e);
    }
    EXPECT_NEAR(std::log2(errs[0] / errs[1]), 2.0, 0.3);
    EXPECT_NEAR(std::log2(errs[1] / errs[2]), 2.0, 0.3);
}

TEST(Stability, CatsEyeSolvesLiouville)
{
    FieldGrid u = catseye_field(1.5, 128, 128);
    EXPECT_NEAR(u.at(5, 7), catseye_exact(1.5, u.x(5), u.y(7)), 1e-14);
    Residual r = pde_residual(u, [](double s) { return std::exp(-2 * s); });
    EXPECT_LT(r.max, 2e-2);
    Residual wrong = pde_residual(u, [](double s) { return -std::exp(-2 * s); });
    EXPECT_GT(wrong.max, 0.1);
    // a = 1 is the parallel shear flow log cosh y, independent of x
    FieldGrid s = catseye_field(1.0, 16, 16);
    EXPECT_DOUBLE_EQ(s.at(0, 3), s.at(9, 3));
    EXPECT_THROW(catseye_field(0.5, 16, 16), error);
    EXPECT_THROW(FieldGrid(3, 16), error);
}

TEST(Stability, ProfilesCarryConsistentDerivatives)
{
    std::vector<double> samples{-1.3, -0.2, 0.0, 0.7, 1.9};
    EXPECT_TRUE(profile_consistent(Profile1D::poly({1, -2, 0.5, 0.25}), samples));
    EXPECT_TRUE(profile_consistent(Profile1D::exp(-0.5, -2), samples));
    EXPECT_TRUE(profile_consistent(Profile1D::cosh(2, 0.5), samples));
    EXPECT_TRUE(profile_consistent(Profile1D::sinh(2, 0.5), samples));
    EXPECT_FALSE(Profile1D::poly({0, 1, 3}).is_affine());
    EXPECT_FALSE(Profile1D::exp(1, 2).is_affine());
    EXPECT_TRUE(Profile1D::poly({2, -1}).is_affine());
    EXPECT_THROW(Profile1D::constant(1)(0.0, 4), error);
}

TEST(Stability, CrmhdEquilibriumSatisfiesItsDefiningRelations)
{
    FieldGrid psi = catseye_field(1.5, 32, 32);
    EquilibriumProfile pr{Profile1D::poly({0, 0.4, 0.1}), Profile1D::poly({0, 0, 1}), Profile1D::poly({0.3, 1}),
                          Profile1D::poly({0, -0.5}), 0.8};
    CrmhdFields eq = crmhd_equilibrium(pr, psi);
    for (std::size_t j = 0; j < psi.ny; ++j)
        for (std::size_t i = 0; i < psi.nx; ++i) {
            std::size_t k = j * psi.nx + i;
            if (eq.resonant[k]) continue;
            double s = psi.values[k], f = pr.Phi(s, 1), v = eq.v.values[k], p = eq.p.values[k];
            // v = p Phi' / be - a2 and p = v Phi' + be (2x - a3)
            EXPECT_NEAR(v, p * f / pr.beta_e - pr.a2(s), 1e-11);
            EXPECT_NEAR(p, v * f + pr.beta_e * (2 * psi.x(i) - pr.a3(s)), 1e-11);
        }
}

TEST(Stability, MinorsMatchDirectDeterminants)
{
    // With Phi affine the Phi'' and Phi''' terms drop out and Q has a closed form.
    FieldGrid psi = catseye_field(1.5, 32, 32);
    EquilibriumProfile pr{Profile1D::poly({0.1, 0.3}), Profile1D::poly({0, 0, 0.7}), Profile1D::poly({0, 0.4, 0.25}),
                          Profile1D::poly({0, 0.1, -0.2}), 0.6};
    CrmhdFields eq = crmhd_equilibrium(pr, psi);
    StabilityReport r = crmhd_minors(eq, pr);
    const FieldGrid& P2 = r.field("P2");
    const FieldGrid& P3 = r.field("P3");
    double be = pr.beta_e, f1 = 0.3;
    for (std::size_t k = 0; k < psi.values.size(); k += 7) {
        double s = psi.values[k], v = eq.v.values[k], p = eq.p.values[k];
        double A = pr.a2(s, 1), B = pr.a3(s, 1);
        double Q = pr.a1(s, 2) + v * pr.a2(s, 2) + p * pr.a3(s, 2);
        Eigen::Matrix3d m;
        m << 1, -f1 / be, A, -f1 / be, 1 / be, B, A, B, Q;
        EXPECT_NEAR(P2.values[k], (m.topLeftCorner<2, 2>().determinant()), 1e-13);
        EXPECT_NEAR(P3.values[k], m.determinant(), 1e-11 * std::max(1.0, std::abs(P3.values[k])));
    }
    EXPECT_EQ(r.condition("phi_prime_bound").passed, psi.values.size());
    // 0.09 <= min(1, 0.6)
    EXPECT_EQ(r.condition("phi_prime_beta_bound").fraction(), 1.0);
}

TEST(Stability, AlfvenicShortcutNeedsXIndependence)
{
    FieldGrid psi = catseye_field(1.5, 32, 32);
    double be = 0.5, cinv = 0.5;
    // a2' = -be c a3' with c = 1 / cinv
    EquilibriumProfile ok{Profile1D::poly({0, cinv}), Profile1D::poly({0, 0, 1}), Profile1D::poly({0, 1}),
                          Profile1D::poly({0, -cinv / be}), be};
    StabilityReport r = crmhd_minors(crmhd_equilibrium(ok, psi), ok);
    const FieldGrid& Jp = r.field("Je_prime");
    const FieldGrid& P2 = r.field("P2");
    const FieldGrid& P3 = r.field("P3");
    for (std::size_t k = 0; k < psi.values.size(); ++k)
        EXPECT_NEAR(P3.values[k], P2.values[k] * (1 - cinv * cinv) * Jp.values[k],
                    1e-12 * std::max(1.0, std::abs(P3.values[k])));
    EXPECT_EQ(r.condition("alfvenic_current_slope").passed, r.condition("p3_nonnegative").passed);

    EquilibriumProfile skewed = ok;
    skewed.a3 = Profile1D::poly({0, 0.2});
    StabilityReport s = crmhd_minors(crmhd_equilibrium(skewed, psi), skewed);
    EXPECT_THROW(s.condition("alfvenic_current_slope"), error);
}

TEST(Stability, ResonanceHandling)
{
    FieldGrid psi = catseye_field(1.5, 16, 16);
    EquilibriumProfile all{Profile1D::poly({0, 1}), Profile1D::constant(0), Profile1D::constant(0),
                           Profile1D::constant(0), 1.0};
    try {
        crmhd_equilibrium(all, psi);
        ADD_FAILURE() << "expected every point to be resonant";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::all_resonant);
    }
    // Phi' = s meets the resonance only on the contour |psi| = 1; off it nothing is masked
    EquilibriumProfile some{Profile1D::poly({0, 0, 0.5}), Profile1D::constant(0), Profile1D::constant(0),
                            Profile1D::constant(0), 1.0};
    auto mask = resonance_mask(some, psi);
    std::size_t masked = std::count(mask.begin(), mask.end(), 1);
    EXPECT_LT(masked, mask.size());
    EquilibriumProfile bad = some;
    bad.beta_e = 0;
    EXPECT_THROW(crmhd_equilibrium(bad, psi), error);
}

TEST(Stability, IslandsWithFlow)
{
    IslandFields f = islands_with_flow(1.0, 0.5, 1.5, 64, 64);
    RmhdProfile pr = islands_profile(1.0, 0.5);
    // Psi'/M' = tanh(nu u) bounded by one
    for (std::size_t k = 0; k < f.u.values.size(); ++k) {
        EXPECT_NEAR(f.Psip.values[k] / f.Mp.values[k], f.DPsi.values[k], 1e-14);
        EXPECT_LE(std::abs(f.DPsi.values[k]), 1.0);
    }
    StabilityReport r = rmhd_da_conditions(pr, f.u);
    EXPECT_EQ(r.condition("dpsi_bound").passed, r.condition("dpsi_bound").evaluated);
    // nu = 0: no flow, M' = k, DPsi = 0
    StabilityReport z = rmhd_da_conditions(islands_profile(1.0, 0.0), f.u);
    EXPECT_EQ(z.condition("dpsi_bound").fraction(), 1.0);
    EXPECT_THROW(islands_profile(0.0, 1.0), error);
}

TEST(Stability, EulerSignCondition)
{
    FieldGrid u = catseye_field(1.5, 16, 16);
    StabilityReport same = euler_rayleigh(Profile1D::poly({1}), Profile1D::poly({2}), u);
    EXPECT_EQ(same.conditions[0].verdict(), "sufficient condition satisfied");
    StabilityReport opposite = euler_rayleigh(Profile1D::poly({1}), Profile1D::poly({-2}), u);
    EXPECT_EQ(opposite.conditions[0].passed, 0u);
    EXPECT_EQ(opposite.conditions[0].verdict(), "not provably stable");
}

TEST(Stability, MasksAndOutput)
{
    EXPECT_EQ(run_lengths({0, 0, 1, 1, 1, 0}), (std::vector<std::size_t>{2, 3, 1}));
    EXPECT_EQ(run_lengths({1, 0}), (std::vector<std::size_t>{0, 1, 1}));
    EXPECT_EQ(run_lengths({}), (std::vector<std::size_t>{0}));
    ConditionResult c = evaluate_condition("x", {0, 1, 0, 0}, [](std::size_t k) { return k != 2; });
    EXPECT_EQ(c.evaluated, 3u);
    EXPECT_EQ(c.passed, 2u);
    EXPECT_EQ(c.pass, (std::vector<std::uint8_t>{1, 0, 0, 1}));

    FieldGrid g(4, 4);
    g.at(1, 2) = 0.5;
    std::ostringstream csv, bin;
    write_field_csv(csv, g);
    EXPECT_EQ(csv.str().substr(0, 10), "x,y,value\n");
    write_field_binary(bin, g);
    EXPECT_EQ(bin.str().size(), 16 * sizeof(double));
    double back;
    std::memcpy(&back, bin.str().data() + (2 * 4 + 1) * sizeof(double), sizeof(double));
    EXPECT_EQ(back, 0.5);
}
