#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "lpx/exactfield.hpp"

using namespace lpx;

namespace {

Matrix random_matrix(seeded_rng& rng, std::size_t r, std::size_t c, long lo = -3, long hi = 3)
{
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = Scalar(rng.uniform(lo, hi));
    return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m)
{
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).real_double();
    return e;
}

} // namespace

TEST(Scalar, ArithmeticInGaussianRationals)
{
    Scalar a(mpq_class(1, 2), mpq_class(1, 3));
    Scalar b(mpq_class(-2), mpq_class(3, 4));
    Scalar p = a * b;
    // (1/2 + i/3)(-2 + 3i/4) = -1 - 1/4 + i(3/8 - 2/3)
    EXPECT_EQ(p, Scalar(mpq_class(-5, 4), mpq_class(-7, 24)));
    EXPECT_EQ(p / b, a);
    EXPECT_EQ(Scalar::imag_unit() * Scalar::imag_unit(), Scalar(-1));
    EXPECT_EQ(a.conj() * a, Scalar(a.norm()));
    EXPECT_THROW(a / Scalar(0), error);
}

TEST(Scalar, TextRoundTrip)
{
    for (auto s : {"0", "1", "2/1", "-3/7", "1/2+1/3*i", "0-5/2*i", "-5/2*i", "-1/1+1/1*i"}) {
        Scalar x = Scalar::parse(s);
        EXPECT_EQ(Scalar::parse(x.str()), x) << s;
    }
    EXPECT_EQ(Scalar(2).str(), "2/1");
    EXPECT_EQ(Scalar(0).str(), "0");
    EXPECT_EQ(Scalar(1).str(), "1");
    EXPECT_EQ(Scalar(mpq_class(-1, 2)).pretty(), "-1/2");
    EXPECT_EQ(Scalar(-2).pretty(), "-2");
    EXPECT_THROW(Scalar::parse("1/0"), error);
    EXPECT_THROW(Scalar::parse("abc"), error);
}

TEST(Matrix, RrefRankAndNullspaceAgreeWithFloatingPoint)
{
    seeded_rng rng(11);
    for (int t = 0; t < 40; ++t) {
        std::size_t r = 2 + t % 4, c = 2 + (t / 4) % 5;
        Matrix a = random_matrix(rng, r, c);
        if (t % 3 == 0) {
            // force a dependent row
            for (std::size_t j = 0; j < c; ++j) a(r - 1, j) = a(0, j) * Scalar(2) - a(1, j);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(to_eigen(a));
        EXPECT_EQ(rank(a), static_cast<std::size_t>(lu.rank()));
        Matrix N = nullspace(a);
        EXPECT_EQ(N.cols(), c - rank(a));
        EXPECT_TRUE((a * N).is_zero());
    }
}

TEST(Matrix, InverseAndPseudoinverse)
{
    seeded_rng rng(5);
    for (int t = 0; t < 30; ++t) {
        Matrix a = random_matrix(rng, 4, 4);
        if (rank(a) < 4) {
            EXPECT_THROW(inverse(a), error);
            continue;
        }
        EXPECT_EQ(a * inverse(a), Matrix::identity(4));
    }
    // Penrose conditions on rank-deficient and complex matrices
    for (int t = 0; t < 20; ++t) {
        Matrix f = random_matrix(rng, 4, 2), g = random_matrix(rng, 2, 3);
        if (t % 2) f(0, 0) += Scalar::imag_unit();
        Matrix a = f * g;
        Matrix p = pseudoinverse(a);
        EXPECT_EQ(a * p * a, a);
        EXPECT_EQ(p * a * p, p);
        EXPECT_EQ((a * p).conj_transpose(), a * p);
        EXPECT_EQ((p * a).conj_transpose(), p * a);
    }
}

TEST(Matrix, CharpolyMatchesCofactorExpansion)
{
    // det(xI - A) at several integer x versus a Leibniz-formula determinant
    auto det3 = [](const Matrix& m) {
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    };
    seeded_rng rng(3);
    for (int t = 0; t < 10; ++t) {
        Matrix a = random_matrix(rng, 3, 3);
        auto c = charpoly(a);
        ASSERT_EQ(c.size(), 4u);
        for (long x = -2; x <= 2; ++x) {
            Matrix m = Scalar(x) * Matrix::identity(3) - a;
            Scalar v = c[0] + c[1] * Scalar(x) + c[2] * Scalar(x * x) + c[3] * Scalar(x * x * x);
            EXPECT_EQ(v, det3(m));
        }
    }
}

TEST(Matrix, GaussianRationalRoots)
{
    // (x - 1/2)(x - i)(x + i)(x - 3) : roots include a conjugate pair
    std::vector<Scalar> roots{Scalar(mpq_class(1, 2)), Scalar::imag_unit(), -Scalar::imag_unit(), Scalar(3)};
    std::vector<Scalar> c{Scalar(1)};
    for (auto& r : roots) {
        std::vector<Scalar> n(c.size() + 1, Scalar(0));
        for (std::size_t k = 0; k < c.size(); ++k) {
            n[k + 1] += c[k];
            n[k] -= r * c[k];
        }
        c = n;
    }
    auto got = gaussian_rational_roots(c);
    ASSERT_EQ(got.size(), roots.size());
    for (auto& r : roots) EXPECT_NE(std::find(got.begin(), got.end(), r), got.end());
    // x^2 - 2 has no rational roots
    EXPECT_THROW(gaussian_rational_roots({Scalar(-2), Scalar(0), Scalar(1)}), error);
}

TEST(Matrix, CommonLowerTriangularization)
{
    // Two commuting strictly lower matrices conjugated by a random change
    Matrix n1(3, 3), n2(3, 3);
    n1(1, 0) = Scalar(1);
    n1(2, 1) = Scalar(1);
    n2 = n1 * n1;
    Matrix P{{1, 2, 0}, {0, 1, 1}, {1, 0, 1}};
    Matrix Pi = inverse(P);
    std::vector<Matrix> ns{Pi * n1 * P, Pi * n2 * P};
    Matrix T = common_lower_triangularize(ns);
    Matrix Ti = inverse(T);
    for (auto& n : ns) EXPECT_TRUE(is_strictly_lower(Ti * n * T));
}

TEST(Matrix, SimultaneousBlockDiagonalization)
{
    Matrix a{{2, 0, 0}, {0, 5, 0}, {0, 1, 5}};
    Matrix b{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    ASSERT_TRUE(commute(a, b));
    auto dec = simultaneous_block_diagonalize({a, b}, 1);
    std::size_t total = 0;
    for (auto s : dec.sizes) total += s;
    EXPECT_EQ(total, 3u);
    EXPECT_EQ(dec.sizes.size(), 2u);
    Matrix Mi = inverse(dec.M);
    for (auto& w : {a, b}) {
        Matrix c = Mi * w * dec.M;
        std::size_t off = 0;
        for (auto s : dec.sizes) {
            for (std::size_t i = off; i < off + s; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    if (j < off || j >= off + s) {
                        EXPECT_TRUE(c(i, j).is_zero());
                    }
            off += s;
        }
    }
    EXPECT_THROW(simultaneous_block_diagonalize({a, Matrix{{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}}), error);
}
