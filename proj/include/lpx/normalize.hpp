#pragma once

// Normal forms and classification of extension tensors.

#include <algorithm>
#include <map>
#include <numeric>
#include <tuple>
#include <optional>
#include <string>
#include <vector>

#include "coextension.hpp"
#include "extension.hpp"

namespace lpx {

// ---------------------------------------------------------------------------
// Block splitting
// ---------------------------------------------------------------------------

inline ExtensionTensor sub_tensor(const ExtensionTensor& W, std::size_t off, std::size_t size)
{
    ExtensionTensor B(size, false);
    for (std::size_t l = 0; l < size; ++l)
        for (std::size_t m = 0; m < size; ++m)
            for (std::size_t n = 0; n < size; ++n) B(l, m, n) = W(off + l, off + m, off + n);
    return B;
}

struct BlockPiece {
    ExtensionTensor tensor;
    std::size_t offset = 0;
    std::size_t size = 0;
};

struct SplitResult {
    BasisChange change;             // transform(W, change) is block diagonal
    std::vector<BlockPiece> blocks;
};

inline SplitResult split_blocks(const ExtensionTensor& W, std::uint64_t seed = 0)
{
    auto dec = simultaneous_block_diagonalize(W.upper_slices(), seed);
    SplitResult r;
    r.change = BasisChange(dec.M);
    ExtensionTensor T = transform(W, r.change);
    std::size_t off = 0;
    for (auto s : dec.sizes) {
        r.blocks.push_back({sub_tensor(T, off, s), off, s});
        off += s;
    }
    return r;
}

// Splitting into ideals with vanishing mutual products. The generalized
// eigenspaces of a generic element of the centroid {T : T(xy) = T(x) y} are such
// ideals, so nilpotent direct sums that share one eigenvalue block separate here.
inline SplitResult ideal_split(const ExtensionTensor& S, std::uint64_t seed = 0)
{
    std::size_t d = S.dim();
    SplitResult r;
    r.change = BasisChange::identity(d);
    r.blocks.push_back({S, 0, d});
    if (d < 2) return r;
    // T(e_m e_n) - T(e_m) e_n = 0, unknown T(p, l) in column p * d + l
    Matrix A(d * d * d, d * d);
    std::size_t row = 0;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t p = 0; p < d; ++p, ++row)
                for (std::size_t k = 0; k < d; ++k) {
                    A(row, p * d + k) += S(k, m, n);
                    A(row, k * d + m) -= S(p, k, n);
                }
    Matrix basis = nullspace(A);
    seeded_rng rng(seed);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Matrix G(d, d);
        for (std::size_t j = 0; j < basis.cols(); ++j) {
            Scalar c(rng.uniform(-8, 8));
            for (std::size_t p = 0; p < d; ++p)
                for (std::size_t l = 0; l < d; ++l) G(p, l) += c * basis(p * d + l, j);
        }
        block_decomposition dec;
        try {
            dec = simultaneous_block_diagonalize({G}, seed + static_cast<std::uint64_t>(attempt));
        } catch (const error& e) {
            if (e.code() != errc::irrational_spectrum) throw;
            continue;
        }
        if (dec.sizes.size() < 2) continue;
        r.change = BasisChange(dec.M);
        ExtensionTensor T = transform(S, r.change);
        r.blocks.clear();
        std::size_t off = 0;
        for (auto sz : dec.sizes) {
            r.blocks.push_back({sub_tensor(T, off, sz), off, sz});
            off += sz;
        }
        return r;
    }
    return r;
}

// Reassemble blocks along the diagonal.
inline ExtensionTensor assemble_blocks(const std::vector<BlockPiece>& blocks, std::size_t dim)
{
    ExtensionTensor T(dim, false);
    for (auto& b : blocks)
        for (std::size_t l = 0; l < b.size; ++l)
            for (std::size_t m = 0; m < b.size; ++m)
                for (std::size_t n = 0; n < b.size; ++n) T(b.offset + l, b.offset + m, b.offset + n) = b.tensor(l, m, n);
    return T;
}

// ---------------------------------------------------------------------------
// Triangular normal form
// ---------------------------------------------------------------------------

struct TriangularForm {
    ExtensionTensor tensor;
    BasisChange change;
    std::vector<Scalar> eps; // eigenvalue of each slice after rescaling
};

inline TriangularForm lower_triangularize(const ExtensionTensor& W)
{
    std::size_t d = W.dim();
    TriangularForm out;
    if (d == 0) {
        out.tensor = W;
        out.change = BasisChange::identity(0);
        return out;
    }
    auto slices = W.upper_slices();
    std::vector<Matrix> nil;
    for (std::size_t k = 0; k < d; ++k) {
        Scalar alpha = trace(slices[k]) / Scalar(static_cast<long>(d));
        Matrix N = slices[k] - alpha * Matrix::identity(d);
        if (!is_nilpotent(N)) throw error(errc::not_applicable, "block carries more than one eigenvalue");
        nil.push_back(N);
    }
    BasisChange B(common_lower_triangularize(nil));
    ExtensionTensor T = transform(W, B);
    Scalar e = T(0, 0, 0);
    if (!e.is_zero() && !e.is_one()) {
        BasisChange S(Scalar(1) / e * Matrix::identity(d));
        T = transform(T, S);
        B = B.then(S);
    }
    for (std::size_t k = 0; k < d; ++k) out.eps.push_back(T(0, 0, k));
    for (std::size_t k = 1; k < d; ++k)
        if (!out.eps[k].is_zero()) throw error(errc::internal, "nonzero eigenvalue beyond the first slot");
    T.set_semidirect(false);
    out.tensor = T;
    out.change = B;
    return out;
}

// Make slot 0 the identity: solve for the shift x of the first basis vector so
// that it becomes a unit eigenvector of the combined operator.
inline std::pair<ExtensionTensor, BasisChange> normalize_w0(const ExtensionTensor& W)
{
    std::size_t d = W.dim();
    if (d == 0 || !W(0, 0, 0).is_one()) throw error(errc::not_semidirect, "slot 0 does not carry eigenvalue 1");
    Matrix w0 = W.upper_slice(0);
    Matrix N0 = w0 - Matrix::identity(d);
    if (!is_strictly_lower(N0)) throw error(errc::not_semidirect, "slot 0 is not unipotent lower triangular");
    for (std::size_t k = 1; k < d; ++k)
        if (!is_strictly_lower(W.upper_slice(k))) throw error(errc::not_semidirect, "solvable slices are not strictly lower triangular");

    std::vector<Scalar> x(d, Scalar(0));
    for (std::size_t l = 1; l < d; ++l) {
        Scalar v = -N0(l, 0);
        for (std::size_t m = 1; m < l; ++m) v -= Scalar(2) * N0(l, m) * x[m];
        for (std::size_t m = 1; m < l; ++m)
            for (std::size_t n = 1; n < l; ++n)
                if (!W(l, m, n).is_zero()) v -= x[n] * W(l, m, n) * x[m];
        x[l] = v;
    }
    Matrix M = Matrix::identity(d);
    for (std::size_t l = 1; l < d; ++l) M(l, 0) = x[l];
    BasisChange B(M);
    ExtensionTensor T = transform(W, B);
    if (T.upper_slice(0) != Matrix::identity(d)) throw error(errc::internal, "slot 0 did not normalize to the identity");
    T.set_semidirect(true);
    return {T, B};
}

// ---------------------------------------------------------------------------
// Coboundary removal on a strictly lower-triangular solvable tensor
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Scalar> vec_of(const Matrix& m) { return m.data(); }

} // namespace detail

// Slices p >= m are reduced modulo the span of the slices tau < m. The shift of
// basis vector tau by k_p^tau e_p removes sum_tau k_p^tau W_(tau) from W_(p).
inline std::pair<ExtensionTensor, BasisChange> remove_coboundaries(const ExtensionTensor& S, std::size_t m)
{
    std::size_t d = S.dim();
    if (m < 1 || m >= d) throw error(errc::index_out_of_range, "split index out of range");
    if (!is_lower_triangular_solvable(S)) throw error(errc::not_applicable, "tensor is not lower triangular");
    std::size_t len = d * d;
    Matrix A(len, m); // columns: vectorized slices tau < m
    for (std::size_t t = 0; t < m; ++t) {
        auto v = detail::vec_of(S.lower_slice(t));
        for (std::size_t k = 0; k < len; ++k) A(k, t) = v[k];
    }
    auto indep = independent_columns(A);
    Matrix Ai = A.select([&] {
        std::vector<std::size_t> r(len);
        std::iota(r.begin(), r.end(), 0);
        return r;
    }(), indep);
    auto red = rref(Ai.transpose()); // rows: echelon basis of the span
    Matrix M = Matrix::identity(d);
    bool any = false;
    for (std::size_t p = m; p < d; ++p) {
        auto w = detail::vec_of(S.lower_slice(p));
        std::vector<Scalar> removed(len, Scalar(0));
        for (std::size_t i = 0; i < red.rank; ++i) {
            Scalar c = w[red.pivots[i]];
            if (c.is_zero()) continue;
            for (std::size_t k = 0; k < len; ++k) removed[k] += c * red.R(i, k);
        }
        if (std::all_of(removed.begin(), removed.end(), [](const Scalar& s) { return s.is_zero(); })) continue;
        // express the removed part in the independent slices
        Matrix rhs(len, 1);
        for (std::size_t k = 0; k < len; ++k) rhs(k, 0) = removed[k];
        auto sol = rref(hstack<Scalar>({Ai, rhs}, len));
        for (std::size_t i = 0; i < sol.rank; ++i) {
            std::size_t col = sol.pivots[i];
            if (col >= indep.size()) throw error(errc::internal, "coboundary system inconsistent");
            M(p, indep[col]) = sol.R(i, indep.size());
        }
        any = true;
    }
    if (!any) return {S, BasisChange::identity(d)};
    BasisChange B(M);
    return {transform(S, B), B};
}

// ---------------------------------------------------------------------------
// Cocycle congruence
// ---------------------------------------------------------------------------

inline std::optional<mpq_class> rational_sqrt(const mpq_class& q)
{
    if (sgn(q) < 0) return std::nullopt;
    mpz_class n = q.get_num(), d = q.get_den();
    if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return mpq_class(rn, rd);
}

// A square root in Q(i) when one exists.
inline std::optional<Scalar> gaussian_sqrt(const Scalar& z)
{
    if (z.is_zero()) return Scalar(0);
    auto r = rational_sqrt(z.norm());
    if (!r) return std::nullopt;
    mpq_class a2 = (z.re + *r) / 2, b2 = (*r - z.re) / 2;
    auto a = rational_sqrt(a2), b = rational_sqrt(b2);
    if (!a || !b) return std::nullopt;
    Scalar s(*a, *b);
    if (s * s == z) return s;
    Scalar t(*a, -*b);
    if (t * t == z) return t;
    return std::nullopt;
}

// Antidiagonal ones on the leading r x r block.
inline Matrix cocycle_pattern(std::size_t size, std::size_t r)
{
    Matrix P(size, size);
    for (std::size_t i = 0; i < r; ++i) P(i, r - 1 - i) = Scalar(1);
    return P;
}

// Only the last slice may be nonzero; congruence-reduce it to the antidiagonal
// pattern when Q(i) allows it, using the free scale of the last basis vector.
inline std::pair<ExtensionTensor, BasisChange> diagonalize_cocycle(const ExtensionTensor& S)
{
    std::size_t d = S.dim();
    if (d == 0) throw error(errc::not_applicable, "empty tensor");
    if (!is_lower_triangular_solvable(S)) throw error(errc::not_applicable, "tensor is not lower triangular");
    for (std::size_t l = 0; l + 1 < d; ++l)
        if (!S.lower_slice(l).is_zero()) throw error(errc::not_applicable, "slices other than the last are nonzero");
    std::size_t m = d - 1;
    Matrix Q(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) Q(a, b) = S(m, a, b);
    std::size_t r = rank(Q);

    auto lift = [&](const Matrix& A, const Scalar& c) {
        Matrix M(d, d);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) M(a, b) = A(a, b);
        M(m, m) = c;
        return BasisChange(M);
    };

    Matrix pat = cocycle_pattern(m, r);
    if (Q == pat) return {S, BasisChange::identity(d)};
    // a pure rescaling of the pattern
    if (r > 0) {
        Scalar s = Q(0, r - 1);
        if (!s.is_zero() && Q == s * pat) {
            BasisChange B = lift(Matrix::identity(m), s);
            return {transform(S, B), B};
        }
    }

    // symmetric elimination: A^T Q A diagonal with the nonzero entries first
    Matrix A = Matrix::identity(m);
    Matrix C = Q;
    auto congr = [&](const Matrix& E) {
        A = A * E;
        C = E.transpose() * C * E;
    };
    for (std::size_t k = 0; k < m; ++k) {
        std::size_t piv = m;
        for (std::size_t i = k; i < m; ++i)
            if (!C(i, i).is_zero()) { piv = i; break; }
        if (piv == m) {
            std::size_t pi = m, pj = m;
            for (std::size_t i = k; i < m && pi == m; ++i)
                for (std::size_t j = i + 1; j < m; ++j)
                    if (!C(i, j).is_zero()) { pi = i; pj = j; break; }
            if (pi == m) break;
            Matrix E = Matrix::identity(m);
            E(pj, pi) = Scalar(1); // e_i -> e_i + e_j
            congr(E);
            piv = pi;
        }
        if (piv != k) {
            Matrix E = Matrix::identity(m);
            E(k, k) = Scalar(0);
            E(piv, piv) = Scalar(0);
            E(k, piv) = Scalar(1);
            E(piv, k) = Scalar(1);
            congr(E);
        }
        Matrix E = Matrix::identity(m);
        for (std::size_t j = k + 1; j < m; ++j) E(k, j) = -C(k, j) / C(k, k);
        congr(E);
    }
    Scalar c = C(0, 0);
    bool all_unit = true;
    Matrix Sc = Matrix::identity(m);
    for (std::size_t i = 0; i < r; ++i) {
        auto s = gaussian_sqrt(C(i, i) / c);
        if (!s) { all_unit = false; continue; }
        Sc(i, i) = Scalar(1) / *s;
    }
    congr(Sc);
    if (all_unit) {
        // pair (i, r-1-i) into hyperbolic planes
        Matrix H = Matrix::identity(m);
        Scalar I = Scalar::imag_unit();
        for (std::size_t i = 0; i < r / 2; ++i) {
            std::size_t j = r - 1 - i;
            H(i, i) = Scalar(1, 2);
            H(j, i) = -I * Scalar(1, 2);
            H(i, j) = Scalar(1);
            H(j, j) = I;
        }
        congr(H);
    }
    BasisChange B = lift(A, c);
    return {transform(S, B), B};
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

struct Fingerprint {
    std::size_t n = 0;
    std::vector<int> eps;
    std::vector<std::size_t> slice_ranks; // generic ranks of powers of a multiplication operator
    std::vector<std::size_t> lcs_dims;
    std::size_t wn_rank = 0;              // generic rank of a combination of lower slices
    std::size_t ann_dim = 0;
    std::size_t der_dim = 0;
    bool coext_vanishes = false;

    // Fields used for matching (coext_vanishes depends on the chosen flag basis).
    auto key() const { return std::tie(n, eps, slice_ranks, lcs_dims, wn_rank, ann_dim, der_dim); }
    friend bool operator==(const Fingerprint& a, const Fingerprint& b) { return a.key() == b.key(); }
};

inline std::size_t derivation_dim(const ExtensionTensor& S)
{
    std::size_t d = S.dim();
    if (d == 0) return 0;
    // unknown D_k^m at column k*d + m; D(e_m) = sum_k D_k^m e_k
    Matrix A(d * d * d, d * d);
    std::size_t row = 0;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n)
            for (std::size_t l = 0; l < d; ++l, ++row) {
                for (std::size_t k = 0; k < d; ++k) {
                    if (!S(k, m, n).is_zero()) A(row, l * d + k) += S(k, m, n);
                    if (!S(l, k, n).is_zero()) A(row, k * d + m) -= S(l, k, n);
                    if (!S(l, m, k).is_zero()) A(row, k * d + n) -= S(l, m, k);
                }
            }
    return d * d - rank(A);
}

inline Fingerprint fingerprint(const ExtensionTensor& W, std::uint64_t seed = 0)
{
    Fingerprint f;
    ExtensionTensor S = W.semidirect() ? strip_semisimple(W) : W;
    std::size_t d = S.dim();
    f.n = d;
    if (W.semidirect()) {
        f.eps.assign(d + 1, 0);
        f.eps[0] = 1;
    } else {
        f.eps.assign(d, 0);
    }
    if (d == 0) {
        f.lcs_dims = {0};
        f.coext_vanishes = true;
        return f;
    }
    auto up = S.upper_slices();

    // lower central series: A, A^2, ...
    Matrix span = Matrix::identity(d);
    f.lcs_dims.push_back(d);
    while (span.cols() > 0) {
        std::vector<Matrix> imgs;
        for (auto& u : up) imgs.push_back(u * span);
        Matrix all = hstack(imgs, d);
        auto idx = independent_columns(all);
        std::vector<std::size_t> rows(d);
        std::iota(rows.begin(), rows.end(), 0);
        Matrix next = all.select(rows, idx);
        if (next.cols() == span.cols()) break; // not nilpotent; stop at the stable term
        span = next;
        f.lcs_dims.push_back(span.cols());
    }

    f.ann_dim = nullspace(vstack(up, d)).cols();
    f.der_dim = derivation_dim(S);

    seeded_rng rng(seed ^ 0x5eedULL);
    for (int draw = 0; draw < 4; ++draw) {
        Matrix L(d, d), Q(d, d);
        for (std::size_t k = 0; k < d; ++k) {
            L += Scalar(rng.uniform(-9, 9)) * up[k];
            Q += Scalar(rng.uniform(-9, 9)) * S.lower_slice(k);
        }
        std::vector<std::size_t> ranks;
        Matrix P = L;
        for (std::size_t k = 0; k < d; ++k) {
            std::size_t r = rank(P);
            if (r == 0) break;
            ranks.push_back(r);
            P = P * L;
        }
        if (ranks.size() > f.slice_ranks.size()) f.slice_ranks.resize(ranks.size(), 0);
        for (std::size_t k = 0; k < ranks.size(); ++k) f.slice_ranks[k] = std::max(f.slice_ranks[k], ranks[k]);
        f.wn_rank = std::max(f.wn_rank, rank(Q));
    }

    try {
        f.coext_vanishes = is_lower_triangular_solvable(S) && coextension(S).vanishes();
    } catch (const error&) {
        f.coext_vanishes = false;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Catalog of solvable extensions of order 3 and 4
// ---------------------------------------------------------------------------

struct CatalogEntry {
    std::string case_id;
    ExtensionTensor tensor;
    Fingerprint fp;
    std::string casimir_table_ref; // expected invariant, in the text notation
};

namespace detail {

// Entries given with printed 1-based labels.
inline ExtensionTensor catalog_tensor(std::size_t n, std::initializer_list<std::array<int, 3>> ones)
{
    ExtensionTensor W(n, false);
    for (auto& e : ones) W.set_sym(e[0] - 1, e[1] - 1, e[2] - 1, Scalar(1));
    return W;
}

} // namespace detail

inline const std::vector<CatalogEntry>& catalog()
{
    static const std::vector<CatalogEntry> cat = [] {
        using detail::catalog_tensor;
        std::vector<CatalogEntry> c = {
            {"n3-1", catalog_tensor(3, {}), {}, "C(v1, v2, v3)"},
            {"n3-2", catalog_tensor(3, {{3, 1, 2}}), {}, "v1 f(v3); v2 f(v3); f(v3)"},
            {"n3-3", catalog_tensor(3, {{2, 1, 1}}), {}, "v1 f(v2); f(v2, v3)"},
            {"n3-4", catalog_tensor(3, {{2, 1, 1}, {3, 1, 2}}), {}, "v1 f(v3) + 1/2 (v2)^2 f'(v3); v2 f(v3); f(v3)"},
            {"n4-1a", catalog_tensor(4, {}), {}, "C(v1, v2, v3, v4)"},
            {"n4-1b", catalog_tensor(4, {{4, 1, 3}, {4, 2, 2}}), {}, "v1 f(v4); v2 f(v4); v3 f(v4); f(v4)"},
            {"n4-2a", catalog_tensor(4, {{3, 1, 2}}), {}, "v1 f(v3); v2 f(v3); f(v3, v4)"},
            {"n4-3a", catalog_tensor(4, {{2, 1, 1}}), {}, "v1 f(v2); f(v2, v3, v4)"},
            {"n4-3b", catalog_tensor(4, {{2, 1, 1}, {4, 3, 3}}), {}, "v1 f(v2); v3 f(v4); f(v2, v4)"},
            {"n4-3c", catalog_tensor(4, {{2, 1, 1}, {4, 1, 3}}), {}, "v1 f(v4) + v2 v3 f'(v4); v3 f(v4); f(v2, v4)"},
            {"n4-3d", catalog_tensor(4, {{2, 1, 1}, {4, 1, 2}, {4, 3, 3}}), {},
             "v1 f(v4) + 1/2 (v2)^2 f'(v4); v3 f(v4); v2 f(v4); f(v4)"},
            {"n4-4a", catalog_tensor(4, {{2, 1, 1}, {3, 1, 2}}), {},
             "v1 f(v3) + 1/2 (v2)^2 f'(v3); v2 f(v3); f(v3, v4)"},
            {"n4-4b", catalog_tensor(4, {{2, 1, 1}, {3, 1, 2}, {4, 1, 3}, {4, 2, 2}}), {},
             "v1 f(v4) + v2 v3 f'(v4) + 1/6 (v3)^3 f''(v4); v2 f(v4) + 1/2 (v3)^2 f'(v4); v3 f(v4); f(v4)"},
        };
        for (auto& e : c) e.fp = fingerprint(e.tensor);
        for (std::size_t a = 0; a < c.size(); ++a)
            for (std::size_t b = a + 1; b < c.size(); ++b)
                if (c[a].fp == c[b].fp)
                    throw error(errc::internal, "catalog fingerprints collide: " + c[a].case_id + " " + c[b].case_id);
        return c;
    }();
    return cat;
}

inline const CatalogEntry* find_catalog(const std::string& id)
{
    for (auto& e : catalog())
        if (e.case_id == id) return &e;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Classification pipeline
// ---------------------------------------------------------------------------

struct NormalForm {
    ExtensionTensor tensor;  // semidirect flag set when slot 0 carries eigenvalue 1
    BasisChange change;      // transform(block, change) == tensor
    std::vector<Scalar> eps;
};

// Triangularize, normalize slot 0, remove coboundaries and reduce the cocycle.
inline NormalForm normal_form(const ExtensionTensor& block)
{
    std::size_t d = block.dim();
    NormalForm nf;
    auto tri = lower_triangularize(block);
    nf.eps = tri.eps;
    ExtensionTensor T = tri.tensor;
    BasisChange B = tri.change;
    bool semi = d > 0 && tri.eps[0].is_one();
    ExtensionTensor S;
    if (semi) {
        auto [T2, B2] = normalize_w0(T);
        T = T2;
        B = B.then(B2);
        S = strip_semisimple(T);
    } else {
        S = T;
    }
    BasisChange BS = BasisChange::identity(S.dim());
    for (std::size_t m = 1; m < S.dim(); ++m) {
        auto [S2, B2] = remove_coboundaries(S, m);
        S = S2;
        BS = BS.then(B2);
    }
    try {
        auto [S2, B2] = diagonalize_cocycle(S);
        S = S2;
        BS = BS.then(B2);
    } catch (const error& e) {
        if (e.code() != errc::not_applicable) throw;
    }
    if (semi) {
        Matrix L = Matrix::identity(d);
        for (std::size_t a = 0; a < S.dim(); ++a)
            for (std::size_t b = 0; b < S.dim(); ++b) L(a + 1, b + 1) = BS.M(a, b);
        BasisChange lifted(L);
        B = B.then(lifted);
        nf.tensor = append_semisimple(S);
    } else {
        B = B.then(BS);
        nf.tensor = S;
    }
    nf.change = B;
    return nf;
}

struct BlockReport {
    std::string case_id;
    bool semidirect = false;
    Fingerprint fp;
    std::optional<Matrix> witness;  // maps the block tensor onto the canonical one
    ExtensionTensor block;          // block tensor in the split basis
    ExtensionTensor normal;
    std::size_t offset = 0, size = 0;
};

struct Classification {
    BasisChange split;
    std::vector<BlockReport> blocks;
};

inline std::optional<ExtensionTensor> canonical_solvable(const std::string& id, std::size_t n)
{
    if (auto e = find_catalog(id)) return e->tensor;
    if (id == "abelian") return abelian(n);
    if (id == "leibniz") return leibniz(n, false);
    return std::nullopt;
}

inline std::string match_case(const Fingerprint& fp, const ExtensionTensor& S)
{
    std::size_t n = fp.n;
    if (n == 3 || n == 4) {
        for (auto& e : catalog())
            if (e.fp == fp) return e.case_id;
        throw error(errc::unknown_case, "fingerprint matches no catalog entry");
    }
    if (S.is_zero()) return "abelian";
    Fingerprint lf = fingerprint(leibniz(n, false));
    lf.eps = fp.eps;
    if (lf == fp) return "leibniz";
    return "unknown";
}

inline Classification classify(const ExtensionTensor& W, std::uint64_t seed = 0)
{
    auto rep = validate(W);
    if (!rep.all_pass()) throw error(errc::not_applicable, "tensor fails the extension axioms");
    Classification out;
    auto split = split_blocks(W, seed);
    out.split = split.change;
    for (auto& piece : split.blocks) {
        BlockReport br;
        br.block = piece.tensor;
        br.offset = piece.offset;
        br.size = piece.size;
        NormalForm nf = normal_form(piece.tensor);
        br.normal = nf.tensor;
        br.semidirect = nf.tensor.semidirect();
        ExtensionTensor S = br.semidirect ? strip_semisimple(nf.tensor) : nf.tensor;
        br.fp = fingerprint(nf.tensor, seed);
        Fingerprint solv = br.fp;
        solv.eps.assign(solv.n, 0);
        br.case_id = match_case(solv, S);
        if (auto canon = canonical_solvable(br.case_id, S.dim())) {
            ExtensionTensor C = br.semidirect ? append_semisimple(*canon) : *canon;
            if (nf.tensor.same_entries(C) && transform(piece.tensor, nf.change).same_entries(C)) br.witness = nf.change.M;
        }
        out.blocks.push_back(std::move(br));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Maximality of the Leibniz extension
// ---------------------------------------------------------------------------

struct MaximalityResult {
    std::size_t n = 0;
    std::size_t solution_dim = 0;   // admissible symmetric cocycle slices
    std::size_t coboundary_dim = 0;
    bool leibniz_is_solution = false;
    bool leibniz_is_coboundary = false;
    bool holds() const
    {
        return solution_dim == coboundary_dim + 1 && leibniz_is_solution && !leibniz_is_coboundary;
    }
};

// Append an unknown symmetric slice W_n to leibniz(n-1); the axioms are linear in it.
inline MaximalityResult maximality_test(std::size_t n)
{
    if (n < 2) throw error(errc::bad_parameter, "order must be at least 2");
    std::size_t m = n - 1;
    ExtensionTensor base = leibniz(m, false);
    std::vector<std::pair<std::size_t, std::size_t>> unknowns;
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a; b < m; ++b) unknowns.push_back({a, b});

    auto embed = [&](const std::vector<Scalar>& u) {
        ExtensionTensor W(n, false);
        for (std::size_t l = 0; l < m; ++l)
            for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b) W(l, a, b) = base(l, a, b);
        for (std::size_t k = 0; k < unknowns.size(); ++k) W.set_sym(m, unknowns[k].first, unknowns[k].second, u[k]);
        return W;
    };
    // residuals of commutation and the tensorial Jacobi identity
    auto residual = [&](const ExtensionTensor& W) {
        std::vector<Scalar> r;
        auto up = W.upper_slices();
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b) {
                Matrix c = up[a] * up[b] - up[b] * up[a];
                r.insert(r.end(), c.data().begin(), c.data().end());
            }
        for (std::size_t l = 0; l < n; ++l)
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    for (std::size_t t = 0; t < n; ++t) {
                        Scalar v(0);
                        for (std::size_t s = 0; s < n; ++s) v += W(l, s, t) * W(s, a, b) - W(l, s, b) * W(s, t, a);
                        r.push_back(v);
                    }
        return r;
    };
    std::size_t nu = unknowns.size();
    std::vector<std::vector<Scalar>> cols;
    for (std::size_t k = 0; k < nu; ++k) {
        std::vector<Scalar> e(nu, Scalar(0));
        e[k] = Scalar(1);
        cols.push_back(residual(embed(e)));
    }
    Matrix A(cols[0].size(), nu);
    for (std::size_t k = 0; k < nu; ++k)
        for (std::size_t i = 0; i < cols[k].size(); ++i) A(i, k) = cols[k][i];

    MaximalityResult res;
    res.n = n;
    Matrix sol = nullspace(A);
    res.solution_dim = sol.cols();

    auto coords = [&](const Matrix& slice) {
        Matrix v(nu, 1);
        for (std::size_t k = 0; k < nu; ++k) v(k, 0) = slice(unknowns[k].first, unknowns[k].second);
        return v;
    };
    std::vector<Matrix> cob;
    for (std::size_t t = 0; t < m; ++t) cob.push_back(coords(base.lower_slice(t)));
    Matrix C = hstack(cob, nu);
    res.coboundary_dim = rank(C);
    Matrix lslice(m, m);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b)
            if (a + b + 2 == n) lslice(a, b) = Scalar(1);
    Matrix lv = coords(lslice);
    res.leibniz_is_solution = (A * lv).is_zero();
    res.leibniz_is_coboundary = rank(hstack<Scalar>({C, lv}, nu)) == res.coboundary_dim;
    // coboundaries must themselves be admissible
    if (!(A * C).is_zero()) throw error(errc::internal, "coboundary slice violates the axioms");
    return res;
}

} // namespace lpx
