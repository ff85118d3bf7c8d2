#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lpx/casimir.hpp"

using namespace lpx;

namespace {

// Numerical evaluation of a family with f = exp(s) for one argument, and
// h(x1..xr) = exp(sum x_k / k) cos(x1) for several.
double evaluate(const CasimirExpression& c, const std::vector<double>& v)
{
    std::vector<double> a;
    for (auto& u : c.args) {
        double s = 0;
        for (std::size_t k = 0; k < u.size(); ++k) s += u[k].real_double() * v[k];
        a.push_back(s);
    }
    double fval;
    if (a.size() == 1) {
        fval = std::exp(a[0]); // every derivative of exp is exp
    } else {
        double e = 0;
        for (std::size_t k = 0; k < a.size(); ++k) e += a[k] / static_cast<double>(k + 1);
        fval = std::exp(e) * std::cos(a[0]);
    }
    double total = 0;
    for (auto& t : c.terms()) {
        double m = t.coeff.real_double();
        for (auto& [k, p] : t.monomial) m *= std::pow(v[k], p);
        total += m * fval;
    }
    return total;
}

// Largest residual of sum_m (W_l^{m nu} H_{ms} - W_s^{m nu} H_{ml}) with a
// central-difference Hessian, relative to the Hessian scale.
double condition_residual(const ExtensionTensor& W, const CasimirExpression& c, const std::vector<double>& v)
{
    std::size_t d = W.dim();
    const double h = 1e-4;
    std::vector<std::vector<double>> H(d, std::vector<double>(d));
    double scale = 1e-12;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = 0; b < d; ++b) {
            auto at = [&](double da, double db) {
                auto w = v;
                w[a] += da;
                w[b] += db;
                return evaluate(c, w);
            };
            H[a][b] = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
            scale = std::max(scale, std::abs(H[a][b]));
        }
    double worst = 0;
    for (std::size_t nu = 0; nu < d; ++nu)
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t s = l + 1; s < d; ++s) {
                double r = 0;
                for (std::size_t m = 0; m < d; ++m)
                    r += W(l, m, nu).real_double() * H[m][s] - W(s, m, nu).real_double() * H[m][l];
                worst = std::max(worst, std::abs(r) / scale);
            }
    return worst;
}

std::vector<ExtensionTensor> examples()
{
    std::vector<ExtensionTensor> out{crmhd(), rmhd(), leibniz(5, false), leibniz(3, true), three_field_mhd()};
    for (auto& e : catalog()) {
        out.push_back(e.tensor);
        out.push_back(append_semisimple(e.tensor));
    }
    return out;
}

std::set<std::string> rendered(const std::vector<CasimirExpression>& fams)
{
    std::set<std::string> s;
    for (auto& f : fams) s.insert(render(f));
    return s;
}

} // namespace

TEST(Casimir, FamiliesSatisfyConditionNumerically)
{
    seeded_rng rng(2);
    for (auto& W : examples()) {
        for (auto& c : casimir_families(W)) {
            for (int t = 0; t < 3; ++t) {
                std::vector<double> v(W.dim());
                for (auto& x : v) x = 0.1 * static_cast<double>(rng.uniform(-5, 5));
                EXPECT_LT(condition_residual(W, c, v), 1e-5) << render(c);
            }
        }
    }
}

TEST(Casimir, NumericalOracleRejectsNonCasimirs)
{
    // v1 f(v3) is not invariant for the n3-4 bracket without its correction term
    ExtensionTensor W = find_catalog("n3-4")->tensor;
    CasimirExpression c;
    c.dim = 3;
    c.family = 1;
    c.args = {{Scalar(0), Scalar(0), Scalar(1)}};
    c.coeffs = {Polynomial::variable(3, 0)};
    EXPECT_GT(condition_residual(W, c, {0.3, -0.2, 0.1}), 1e-3);
    EXPECT_FALSE(verify_casimir(W, c, 3));
}

TEST(Casimir, ExactVerificationMatchesEveryGeneratedFamily)
{
    for (auto& W : examples())
        for (auto& c : casimir_families(W)) EXPECT_TRUE(verify_casimir(W, c, static_cast<unsigned>(W.order() + 2)));
}

TEST(Casimir, OrderThreeTable)
{
    EXPECT_EQ(rendered(casimir_families(find_catalog("n3-4")->tensor)),
              (std::set<std::string>{"v1 f(v3) + 1/2 (v2)^2 f'(v3)", "v2 f(v3)", "f(v3)"}));
    EXPECT_EQ(rendered(casimir_families(find_catalog("n3-3")->tensor)),
              (std::set<std::string>{"v1 f(v2)", "f(v2, v3)"}));
}

TEST(Casimir, SingularCoextension)
{
    ExtensionTensor W = find_catalog("n4-3c")->tensor;
    Coextension c = coextension(W);
    EXPECT_TRUE(c.singular);
    EXPECT_EQ(c.wn_pinv, c.wn);
    EXPECT_EQ(c.coW[0], (Matrix{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
    EXPECT_EQ(rendered(casimir_families(W)),
              (std::set<std::string>{"v1 f(v4) + v2 v3 f'(v4)", "v3 f(v4)", "f(v2, v4)"}));
}

TEST(Casimir, LeibnizClosedFormMatchesGenerator)
{
    for (std::size_t n = 2; n <= 6; ++n) {
        for (bool semi : {false, true}) {
            ExtensionTensor W = leibniz(n, semi);
            auto fams = casimir_families(W);
            for (std::size_t nu = semi ? 0 : 1; nu <= n; ++nu) {
                CasimirExpression closed = leibniz_casimirs(n, nu, semi);
                EXPECT_TRUE(verify_casimir(W, closed, static_cast<unsigned>(n + 1))) << n << " " << nu;
                bool found = false;
                for (auto& f : fams)
                    if (f.family == nu) {
                        found = true;
                        EXPECT_EQ(render(f), render(closed)) << n << " " << nu;
                    }
                EXPECT_TRUE(found) << n << " " << nu;
            }
        }
    }
    EXPECT_THROW(leibniz_casimirs(3, 0, false), error);
    EXPECT_THROW(leibniz_casimirs(3, 4, false), error);
}

TEST(Casimir, CompressibleModel)
{
    EXPECT_EQ(rendered(casimir_families(crmhd())),
              (std::set<std::string>{"v0 f(v3) - 2 v1 v2 f'(v3)", "v1 f(v3)", "v2 f(v3)", "f(v3)"}));
    // -1/beta_e scaling of the semidirect family
    auto fams = casimir_families(crmhd(Scalar(4)));
    EXPECT_EQ(rendered(fams).count("v0 f(v3) - 1/4 v1 v2 f'(v3)"), 1u);
}

TEST(Casimir, FamiliesFollowBasisChanges)
{
    // Non-normal input goes through the block pipeline, including the
    // direct-sum re-split; the family count is a conjugation invariant.
    seeded_rng rng(5);
    for (auto& e : catalog()) {
        std::size_t d = e.tensor.dim();
        std::size_t expected = casimir_families(e.tensor).size();
        for (int t = 0; t < 4; ++t) {
            Matrix M(d, d);
            do {
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = 0; j < d; ++j) M(i, j) = Scalar(rng.uniform(-2, 2));
            } while (rank(M) < d);
            ExtensionTensor T = transform(e.tensor, BasisChange(M));
            std::vector<CasimirExpression> fams;
            try {
                fams = casimir_families(T);
            } catch (const error& err) {
                // the singular 3c coextension needs its interleaved canonical ordering,
                // which the triangular normal form does not recover
                bool coext = err.code() == errc::coext_condition_failed || err.code() == errc::solvability_failed;
                EXPECT_TRUE(coext && std::string(e.case_id) == "n4-3c") << e.case_id << ": " << err.what();
                continue;
            }
            EXPECT_EQ(fams.size(), expected) << e.case_id;
            for (auto& c : fams) EXPECT_TRUE(verify_casimir(T, c, 5)) << e.case_id << ": " << render(c);
        }
    }
}

TEST(Casimir, RenderingConventions)
{
    auto fams = casimir_families(append_semisimple(find_catalog("n4-4b")->tensor));
    EXPECT_EQ(rendered(fams).count(
                  "v0 f(v4) + v1 v3 f'(v4) + 1/2 (v2)^2 f'(v4) + 1/2 v2 (v3)^2 f''(v4) + 1/24 (v3)^4 f'''(v4)"),
              1u);
    EXPECT_EQ(detail::primes(4), "^(4)");
}

TEST(Casimir, QuadraticInvariantsOfFiniteDimensionalExtensions)
{
    LieAlgebraSpec so3 = LieAlgebraSpec::so3();
    EXPECT_EQ(so3.killing(), Scalar(-2) * Matrix::identity(3));
    ExtensionTensor body(0, true);
    body(0, 0, 0) = Scalar(1);
    auto rb = quadratic_casimirs_findim(body, so3);
    ASSERT_EQ(rb.size(), 1u);
    auto top = quadratic_casimirs_findim(rmhd(), so3);
    ASSERT_EQ(top.size(), 2u);
    // span{[[0,1],[1,0]], [[0,0],[0,1]]}
    for (auto& C : top) EXPECT_TRUE(C(0, 0).is_zero());
    LieAlgebraSpec ab;
    ab.dim = 2;
    ab.c.assign(8, Scalar(0));
    EXPECT_THROW(quadratic_casimirs_findim(rmhd(), ab), error);
}
