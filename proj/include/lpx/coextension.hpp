#pragma once

// Coextension of a lower-triangular extension: the tensor coW^n_{ts} built from
// the (pseudo)inverse of the last slice.

#include <functional>
#include <optional>
#include <vector>

#include "extension.hpp"

namespace lpx {

struct Coextension {
    std::size_t m = 0;          // coW indices run over 0..m-1 (solvable storage)
    std::vector<Matrix> coW;    // coW[n](t, s) = coW^n_{ts}
    Matrix wn;                  // last slice restricted to the first m indices
    Matrix wn_pinv;
    Matrix projector;           // wn * wn_pinv
    bool singular = false;

    bool vanishes() const
    {
        for (auto& c : coW)
            if (!c.is_zero()) return false;
        return true;
    }
};

// W_l^{mn} != 0 only when m < l and n < l.
inline bool is_lower_triangular_solvable(const ExtensionTensor& S)
{
    std::size_t d = S.dim();
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n)
                if (!S(l, m, n).is_zero() && (m >= l || n >= l)) return false;
    return true;
}

// Normalized semidirect: slot 0 is the identity and the rest is strictly lower.
inline bool is_normalized_semidirect(const ExtensionTensor& W)
{
    if (!W.semidirect()) return false;
    if (W.upper_slice(0) != Matrix::identity(W.dim())) return false;
    return is_lower_triangular_solvable(strip_semisimple(W));
}

inline ExtensionTensor solvable_part(const ExtensionTensor& W)
{
    if (W.semidirect()) {
        if (!is_normalized_semidirect(W)) throw error(errc::not_applicable, "semidirect tensor is not in normal form");
        return strip_semisimple(W);
    }
    if (!is_lower_triangular_solvable(W)) throw error(errc::not_applicable, "tensor is not lower triangular");
    return W;
}

namespace detail {

struct coext_inputs {
    std::size_t m;
    Matrix wn;
    std::vector<Matrix> lower; // W~_(s), s < m
    std::vector<Matrix> upper; // W~^(n), n < m, as (s, r) = W_s^{r n}
};

inline coext_inputs coext_setup(const ExtensionTensor& S)
{
    coext_inputs in;
    std::size_t d = S.dim();
    in.m = d == 0 ? 0 : d - 1;
    std::size_t m = in.m;
    in.wn = Matrix(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) in.wn(a, b) = S(d - 1, a, b);
    for (std::size_t s = 0; s < m; ++s) {
        Matrix lo(m, m), up(m, m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                lo(a, b) = S(s, a, b);
                up(a, b) = S(a, b, s);
            }
        in.lower.push_back(lo);
        in.upper.push_back(up);
    }
    return in;
}

} // namespace detail

// Three-term formula valid for any Wn passing the solvability test.
inline Matrix coext_slice_general(const Matrix& upper, const Matrix& wn, const Matrix& wn_pinv)
{
    Matrix a = upper * wn_pinv;
    return a + a.transpose() - wn_pinv * wn * upper * wn_pinv;
}

// Formula for invertible Wn.
inline Matrix coext_slice_nonsingular(const Matrix& upper, const Matrix& wn_inv)
{
    return wn_inv * upper.transpose();
}

inline bool coext_condition_holds(const std::vector<Matrix>& coW)
{
    std::size_t m = coW.size();
    for (std::size_t n = 0; n < m; ++n) {
        if (coW[n] != coW[n].transpose()) return false;
        // coW^u_{ts} coW^n_{ul} = coW^u_{tl} coW^n_{us}
        for (std::size_t t = 0; t < m; ++t)
            for (std::size_t s = 0; s < m; ++s)
                for (std::size_t l = 0; l < m; ++l) {
                    Scalar lhs(0), rhs(0);
                    for (std::size_t u = 0; u < m; ++u) {
                        lhs += coW[u](t, s) * coW[n](u, l);
                        rhs += coW[u](t, l) * coW[n](u, s);
                    }
                    if (lhs != rhs) return false;
                }
    }
    return true;
}

namespace detail {

// Symmetric reflexive inverse G of a symmetric wn with ker G = span(K): G = C (C^T wn C)^-1 C^T
// where the columns of C annihilate K.
inline std::optional<Matrix> inverse_with_kernel(const Matrix& wn, const Matrix& K)
{
    Matrix C = nullspace(K.transpose());
    Matrix core = C.transpose() * wn * C;
    if (rank(core) != core.rows()) return std::nullopt;
    return C * inverse(core) * C.transpose();
}

inline bool fill_coextension(Coextension& c, const coext_inputs& in, const Matrix& g)
{
    c.wn_pinv = g;
    c.projector = in.wn * g;
    c.coW.clear();
    for (std::size_t s = 0; s < in.m; ++s)
        if (c.projector * in.lower[s] != in.lower[s] * c.projector) return false;
    for (std::size_t n = 0; n < in.m; ++n)
        c.coW.push_back(c.singular ? coext_slice_general(in.upper[n], in.wn, g) : coext_slice_nonsingular(in.upper[n], g));
    return coext_condition_holds(c.coW);
}

// Complements of range(wn) spanned by joint-kernel vectors of the lower slices,
// unit vectors, and sums or differences of kernel vectors, tried in that order.
inline bool search_generalized_inverse(Coextension& c, const coext_inputs& in)
{
    std::size_t m = in.m, corank = m - rank(in.wn);
    Matrix J = nullspace(vstack(in.lower, m));
    std::vector<Matrix> pool;
    for (std::size_t j = 0; j < J.cols(); ++j) pool.push_back(J.column(j));
    for (std::size_t j = 0; j < m; ++j) pool.push_back(Matrix::identity(m).column(j));
    for (std::size_t a = 0; a < J.cols(); ++a)
        for (std::size_t b = a + 1; b < J.cols(); ++b) {
            pool.push_back(J.column(a) + J.column(b));
            pool.push_back(J.column(a) - J.column(b));
        }
    std::vector<std::size_t> pick(corank);
    auto attempt = [&]() {
        std::vector<Matrix> cols;
        for (auto k : pick) cols.push_back(pool[k]);
        Matrix K = hstack(cols, m);
        if (rank(hstack<Scalar>({in.wn, K}, m)) != m) return false;
        for (auto& L : in.lower)
            if (rank(hstack<Scalar>({K, L * K}, m)) != corank) return false;
        auto g = inverse_with_kernel(in.wn, K);
        return g && fill_coextension(c, in, *g);
    };
    // lexicographic combinations of `corank` pool entries
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) {
        if (depth == corank) return attempt();
        for (std::size_t k = from; k < pool.size(); ++k) {
            pick[depth] = k;
            if (rec(depth + 1, k + 1)) return true;
        }
        return false;
    };
    return rec(0, 0);
}

} // namespace detail

// The Moore-Penrose inverse is tried first; when Wn is singular and it fails the
// commutation or composition test, other reflexive inverses are searched whose
// kernel is a slice-invariant complement of range(Wn). Only the standard inner
// product is basis dependent, so this recovers conjugated inputs.
inline Coextension coextension(const ExtensionTensor& W)
{
    ExtensionTensor S = solvable_part(W);
    auto in = detail::coext_setup(S);
    Coextension c;
    c.m = in.m;
    c.wn = in.wn;
    c.singular = rank(in.wn) < in.m;
    Matrix pinv = pseudoinverse(in.wn);
    if (detail::fill_coextension(c, in, pinv)) return c;
    bool commuting = true;
    for (std::size_t s = 0; s < in.m; ++s)
        if (in.wn * pinv * in.lower[s] != in.lower[s] * in.wn * pinv) commuting = false;
    if (c.singular && detail::search_generalized_inverse(c, in)) return c;
    if (!commuting) throw error(errc::solvability_failed, "no projector onto range(Wn) commutes with the lower slices");
    throw error(errc::coext_condition_failed, "coextension violates its composition law");
}

} // namespace lpx
