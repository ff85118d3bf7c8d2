#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "lpx/dynamics.hpp"

using namespace lpx;

namespace {

ExtensionTensor rigid_body_tensor()
{
    ExtensionTensor W(0, true);
    W(0, 0, 0) = Scalar(1);
    return W;
}

// Jacobian of the vector field by central differences.
Eigen::MatrixXd jacobian(const ExtensionTensor& W, const HamiltonianSpec& H, const SimState& s)
{
    LieAlgebraSpec so3 = LieAlgebraSpec::so3();
    CoadjointSystem sys(W, so3);
    std::size_t N = s.v.size();
    Eigen::MatrixXd J(N, N);
    const double h = 1e-6;
    for (std::size_t q = 0; q < N; ++q) {
        SimState p = s, m = s;
        p.v[q] += h;
        m.v[q] -= h;
        auto fp = coadjoint_rhs(sys, H, p), fm = coadjoint_rhs(sys, H, m);
        for (std::size_t r = 0; r < N; ++r) J(r, q) = (fp[r] - fm[r]) / (2 * h);
    }
    return J;
}

double dot(const SimState& s, std::size_t a, std::size_t b)
{
    return s.at(a, 0) * s.at(b, 0) + s.at(a, 1) * s.at(b, 1) + s.at(a, 2) * s.at(b, 2);
}

} // namespace

TEST(Dynamics, RigidBodyVectorField)
{
    SimState s(1, 3);
    s.v = {0.0, 1.0, 1.0};
    auto f = coadjoint_rhs(rigid_body_tensor(), LieAlgebraSpec::so3(), HamiltonianSpec(RigidBody{{1, 2, 3}}), s);
    // Omega x l with Omega = l / I
    EXPECT_NEAR(f[0], 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(f[1], 0.0, 1e-15);
    EXPECT_NEAR(f[2], 0.0, 1e-15);
}

TEST(Dynamics, IntermediateAxisIsTheOnlyUnstableOne)
{
    std::array<double, 3> I{1, 2, 3};
    HamiltonianSpec H(RigidBody{I});
    for (std::size_t axis = 0; axis < 3; ++axis) {
        SimState s(1, 3);
        s.at(0, axis) = 1.0;
        Eigen::EigenSolver<Eigen::MatrixXd> es(jacobian(rigid_body_tensor(), H, s));
        double max_re = 0;
        for (auto& ev : es.eigenvalues()) max_re = std::max(max_re, ev.real());
        std::size_t j = (axis + 1) % 3, k = (axis + 2) % 3;
        double lam2 = (1 / I[axis] - 1 / I[j]) * (1 / I[k] - 1 / I[axis]);
        if (axis == 1) {
            EXPECT_NEAR(max_re, std::sqrt(lam2), 1e-6);
        } else {
            EXPECT_LT(lam2, 0);
            EXPECT_NEAR(max_re, 0.0, 1e-6);
        }
    }
}

TEST(Dynamics, RigidBodyConservesEnergyAndTotalMomentum)
{
    SimState s(1, 3);
    s.v = {0.6, 0.0, 0.8};
    HamiltonianSpec H(RigidBody{{1, 2, 3}});
    Trajectory tr = rk4_run(rigid_body_tensor(), LieAlgebraSpec::so3(), H, s, 1e-3, 10000, {}, 500);
    double l0 = dot(tr.states.front(), 0, 0);
    for (auto& st : tr.states) {
        EXPECT_NEAR(dot(st, 0, 0), l0, 1e-10);
        EXPECT_NEAR(H.value(st), H.value(tr.states.front()), 1e-10);
    }
    EXPECT_NEAR(tr.states.back().t, 10.0, 1e-9);
}

TEST(Dynamics, HeavyTopInvariantsAgreeWithDirectFormulas)
{
    LieAlgebraSpec so3 = LieAlgebraSpec::so3();
    std::vector<Monitor> mons;
    for (auto& C : quadratic_casimirs_findim(rmhd(), so3)) mons.push_back(quadratic_casimir_monitor(C, so3));
    ASSERT_EQ(mons.size(), 2u);
    SimState s(2, 3);
    s.v = {0.3, -0.5, 0.8, 0.1, 0.7, -0.2};
    HamiltonianSpec H(HeavyTop{{1, 2, 3}, 2.0, {0.2, 0.0, 1.0}});
    Trajectory tr = rk4_run(rmhd(), so3, H, s, 1e-3, 5000, mons, 250);
    for (auto& st : tr.states) {
        EXPECT_NEAR(dot(st, 0, 1), dot(s, 0, 1), 1e-10); // l . Gamma
        EXPECT_NEAR(dot(st, 1, 1), dot(s, 1, 1), 1e-10); // |Gamma|^2
    }
    for (double d : relative_drift(tr)) EXPECT_LT(d, 1e-9);
}

TEST(Dynamics, QuadraticHamiltonianOnAnExtension)
{
    // Leibniz extension over so(3) with a diagonal quadratic energy
    ExtensionTensor W = leibniz(2, true);
    SimState s(3, 3);
    for (std::size_t k = 0; k < 9; ++k) s.v[k] = 0.1 * static_cast<double>(k % 4) - 0.15;
    std::vector<double> Q(81, 0.0);
    for (std::size_t k = 0; k < 9; ++k) Q[k * 9 + k] = 1.0 + 0.25 * static_cast<double>(k % 3);
    HamiltonianSpec H(QuadraticHamiltonian{Q});
    LieAlgebraSpec so3 = LieAlgebraSpec::so3();
    std::vector<Monitor> mons;
    for (auto& C : quadratic_casimirs_findim(W, so3)) mons.push_back(quadratic_casimir_monitor(C, so3));
    EXPECT_GE(mons.size(), 1u);
    Trajectory tr = rk4_run(W, so3, H, s, 1e-3, 4000, mons, 400);
    for (double d : relative_drift(tr)) EXPECT_LT(d, 1e-8);
}

TEST(Dynamics, GuardsAndOutput)
{
    SimState s(1, 3);
    s.v = {1e3, 2e3, -1e3};
    HamiltonianSpec H(RigidBody{{1, 2, 3}});
    LieAlgebraSpec so3 = LieAlgebraSpec::so3();
    EXPECT_THROW(rk4_run(rigid_body_tensor(), so3, H, s, 0.0, 10), error);
    try {
        rk4_run(rigid_body_tensor(), so3, H, s, 1e6, 1000);
        ADD_FAILURE() << "expected the state to overflow";
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::non_finite);
    }
    SimState wrong(2, 3);
    EXPECT_THROW(coadjoint_rhs(rigid_body_tensor(), so3, H, wrong), error);

    s.v = {0.6, 0.0, 0.8};
    Trajectory tr = rk4_run(rigid_body_tensor(), so3, H, s, 1e-2, 3, {}, 1);
    std::ostringstream os;
    write_trajectory_csv(os, tr, true);
    const std::string csv = os.str();
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,v0_1,v0_2,v0_3,H");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    EXPECT_EQ(format17(0.1), "0.10000000000000001");
}
