#pragma once

// Extension tensors W_l^{mn}, their axioms, basis changes and constructors.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "exactfield.hpp"
#include "polynomial.hpp"

namespace lpx {

// Storage is W[l][m][n] over 0..dim-1. Solvable tensors are labelled 1..n when
// printed; semidirect tensors keep the labels 0..n with slot 0 the identity slot.
class ExtensionTensor {
public:
    ExtensionTensor() = default;
    ExtensionTensor(std::size_t order, bool semidirect)
        : n_(order), semidirect_(semidirect), w_(cube(semidirect ? order + 1 : order), Scalar(0)) {}

    static ExtensionTensor from_dim(std::size_t dim, bool semidirect)
    {
        if (semidirect && dim == 0) throw error(errc::dimension_mismatch, "semidirect tensor needs at least one slot");
        return ExtensionTensor(semidirect ? dim - 1 : dim, semidirect);
    }

    std::size_t order() const { return n_; }
    bool semidirect() const { return semidirect_; }
    std::size_t dim() const { return semidirect_ ? n_ + 1 : n_; }

    Scalar& operator()(std::size_t l, std::size_t m, std::size_t n) { return w_[index(l, m, n)]; }
    const Scalar& operator()(std::size_t l, std::size_t m, std::size_t n) const { return w_[index(l, m, n)]; }

    // Printed label of a storage index.
    int label(std::size_t k) const { return semidirect_ ? static_cast<int>(k) : static_cast<int>(k) + 1; }

    // (W^(n))_l^m = W_l^{mn}
    Matrix upper_slice(std::size_t n) const
    {
        Matrix s(dim(), dim());
        for (std::size_t l = 0; l < dim(); ++l)
            for (std::size_t m = 0; m < dim(); ++m) s(l, m) = (*this)(l, m, n);
        return s;
    }

    // (W_(l))^{mn} = W_l^{mn}
    Matrix lower_slice(std::size_t l) const
    {
        Matrix s(dim(), dim());
        for (std::size_t m = 0; m < dim(); ++m)
            for (std::size_t n = 0; n < dim(); ++n) s(m, n) = (*this)(l, m, n);
        return s;
    }

    std::vector<Matrix> upper_slices() const
    {
        std::vector<Matrix> v;
        for (std::size_t k = 0; k < dim(); ++k) v.push_back(upper_slice(k));
        return v;
    }

    // Sets W_l^{mn} and W_l^{nm} together.
    void set_sym(std::size_t l, std::size_t m, std::size_t n, const Scalar& v)
    {
        (*this)(l, m, n) = v;
        (*this)(l, n, m) = v;
    }

    bool is_zero() const
    {
        for (auto& x : w_)
            if (!x.is_zero()) return false;
        return true;
    }

    void set_semidirect(bool s)
    {
        if (s && dim() == 0) throw error(errc::dimension_mismatch, "empty tensor cannot be semidirect");
        std::size_t d = dim();
        semidirect_ = s;
        n_ = s ? d - 1 : d;
    }

    friend bool operator==(const ExtensionTensor& a, const ExtensionTensor& b)
    {
        return a.n_ == b.n_ && a.semidirect_ == b.semidirect_ && a.w_ == b.w_;
    }
    // Equality of the arrays, ignoring the labelling flag.
    bool same_entries(const ExtensionTensor& o) const { return dim() == o.dim() && w_ == o.w_; }

private:
    static std::size_t cube(std::size_t d) { return d * d * d; }
    std::size_t index(std::size_t l, std::size_t m, std::size_t n) const
    {
        std::size_t d = dim();
        return (l * d + m) * d + n;
    }

    std::size_t n_ = 0;
    bool semidirect_ = false;
    std::vector<Scalar> w_;
};

struct BasisChange {
    Matrix M;
    Matrix Minv;

    BasisChange() = default;
    explicit BasisChange(Matrix m) : M(std::move(m)), Minv(inverse(M)) {}
    static BasisChange identity(std::size_t n) { return BasisChange(Matrix::identity(n)); }
    BasisChange inverse_change() const
    {
        BasisChange b;
        b.M = Minv;
        b.Minv = M;
        return b;
    }
    // Apply this change, then `next`.
    BasisChange then(const BasisChange& next) const
    {
        BasisChange b;
        b.M = M * next.M;
        b.Minv = next.Minv * Minv;
        return b;
    }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct AxiomResult {
    std::string name;
    bool pass = true;
    std::vector<std::size_t> first_violation; // storage indices
};

struct ValidationReport {
    std::vector<AxiomResult> axioms;
    bool all_pass() const
    {
        for (auto& a : axioms)
            if (!a.pass) return false;
        return true;
    }
    const AxiomResult& get(const std::string& name) const
    {
        for (auto& a : axioms)
            if (a.name == name) return a;
        throw error(errc::index_out_of_range, "no axiom named " + name);
    }
};

inline ValidationReport validate(const ExtensionTensor& W)
{
    std::size_t d = W.dim();
    ValidationReport rep;

    AxiomResult sym{"symmetry", true, {}};
    for (std::size_t l = 0; l < d && sym.pass; ++l)
        for (std::size_t m = 0; m < d && sym.pass; ++m)
            for (std::size_t n = 0; n < d && sym.pass; ++n)
                if (W(l, m, n) != W(l, n, m)) sym = {"symmetry", false, {l, m, n}};
    rep.axioms.push_back(sym);

    auto slices = W.upper_slices();
    AxiomResult com{"commutation", true, {}};
    for (std::size_t a = 0; a < d && com.pass; ++a)
        for (std::size_t b = a + 1; b < d && com.pass; ++b)
            if (!commute(slices[a], slices[b])) com = {"commutation", false, {a, b}};
    rep.axioms.push_back(com);

    // sum_s W_l^{st} W_s^{mn} = sum_s W_l^{sn} W_s^{tm}
    AxiomResult jac{"jacobi", true, {}};
    for (std::size_t l = 0; l < d && jac.pass; ++l)
        for (std::size_t m = 0; m < d && jac.pass; ++m)
            for (std::size_t n = 0; n < d && jac.pass; ++n)
                for (std::size_t t = 0; t < d && jac.pass; ++t) {
                    Scalar lhs(0), rhs(0);
                    for (std::size_t s = 0; s < d; ++s) {
                        if (!W(l, s, t).is_zero() && !W(s, m, n).is_zero()) lhs += W(l, s, t) * W(s, m, n);
                        if (!W(l, s, n).is_zero() && !W(s, t, m).is_zero()) rhs += W(l, s, n) * W(s, t, m);
                    }
                    if (lhs != rhs) jac = {"jacobi", false, {l, m, n, t}};
                }
    rep.axioms.push_back(jac);

    if (W.semidirect()) {
        AxiomResult id{"semidirect_identity", true, {}};
        Matrix w0 = slices.at(0);
        for (std::size_t i = 0; i < d && id.pass; ++i)
            for (std::size_t j = 0; j < d && id.pass; ++j)
                if (w0(i, j) != Scalar(i == j ? 1 : 0)) id = {"semidirect_identity", false, {i, j, 0}};
        rep.axioms.push_back(id);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Basis change: Wbar_b^{ag} = (M^-1)_b^l W_l^{mn} M_m^a M_n^g
// ---------------------------------------------------------------------------

inline ExtensionTensor transform(const ExtensionTensor& W, const BasisChange& B)
{
    std::size_t d = W.dim();
    if (B.M.rows() != d || B.M.cols() != d) throw error(errc::dimension_mismatch, "basis change size does not match tensor");
    const Matrix& M = B.M;
    const Matrix& Mi = B.Minv;
    // contract n, then m, then l
    std::vector<Scalar> t1(d * d * d, Scalar(0)), t2(d * d * d, Scalar(0));
    auto at = [d](std::size_t a, std::size_t b, std::size_t c) { return (a * d + b) * d + c; };
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n) {
                const Scalar& w = W(l, m, n);
                if (w.is_zero()) continue;
                for (std::size_t g = 0; g < d; ++g)
                    if (!M(n, g).is_zero()) t1[at(l, m, g)] += w * M(n, g);
            }
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t g = 0; g < d; ++g) {
                const Scalar& w = t1[at(l, m, g)];
                if (w.is_zero()) continue;
                for (std::size_t a = 0; a < d; ++a)
                    if (!M(m, a).is_zero()) t2[at(l, a, g)] += w * M(m, a);
            }
    ExtensionTensor out(W.order(), W.semidirect());
    for (std::size_t b = 0; b < d; ++b)
        for (std::size_t l = 0; l < d; ++l) {
            if (Mi(b, l).is_zero()) continue;
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t g = 0; g < d; ++g) {
                    const Scalar& w = t2[at(l, a, g)];
                    if (!w.is_zero()) out(b, a, g) += Mi(b, l) * w;
                }
        }
    return out;
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

inline ExtensionTensor abelian(std::size_t n) { return ExtensionTensor(n, false); }

// W_l^{mn} = delta_l^{m+n} in the printed labelling.
inline ExtensionTensor leibniz(std::size_t n, bool semidirect)
{
    if (n < 1) throw error(errc::bad_parameter, "leibniz order must be at least 1");
    ExtensionTensor W(n, semidirect);
    std::size_t d = W.dim();
    std::size_t shift = semidirect ? 0 : 1;
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n2 = 0; n2 < d; ++n2) {
            std::size_t l = m + n2 + shift;
            if (l < d) W(l, m, n2) = Scalar(1);
        }
    return W;
}

// Block tensor; the result is labelled as a solvable-style tensor.
inline ExtensionTensor direct_sum(const ExtensionTensor& A, const ExtensionTensor& B)
{
    std::size_t da = A.dim(), db = B.dim();
    ExtensionTensor W(da + db, false);
    for (std::size_t l = 0; l < da; ++l)
        for (std::size_t m = 0; m < da; ++m)
            for (std::size_t n = 0; n < da; ++n) W(l, m, n) = A(l, m, n);
    for (std::size_t l = 0; l < db; ++l)
        for (std::size_t m = 0; m < db; ++m)
            for (std::size_t n = 0; n < db; ++n) W(da + l, da + m, da + n) = B(l, m, n);
    if (db == 0 && A.semidirect()) return A;
    if (da == 0 && B.semidirect()) return B;
    return W;
}

inline ExtensionTensor append_semisimple(const ExtensionTensor& S)
{
    if (S.semidirect()) throw error(errc::not_solvable, "tensor already carries a semisimple slot");
    for (std::size_t k = 0; k < S.dim(); ++k)
        if (!is_nilpotent(S.upper_slice(k))) throw error(errc::not_solvable, "slice " + std::to_string(k) + " is not nilpotent");
    ExtensionTensor W(S.order(), true);
    std::size_t d = W.dim();
    for (std::size_t k = 0; k < d; ++k) W.set_sym(k, k, 0, Scalar(1));
    for (std::size_t l = 0; l < S.dim(); ++l)
        for (std::size_t m = 0; m < S.dim(); ++m)
            for (std::size_t n = 0; n < S.dim(); ++n) W(l + 1, m + 1, n + 1) = S(l, m, n);
    return W;
}

// Solvable part of a normalized semidirect tensor (slot 0 removed).
inline ExtensionTensor strip_semisimple(const ExtensionTensor& W)
{
    if (!W.semidirect()) throw error(errc::not_semidirect, "tensor has no semisimple slot");
    ExtensionTensor S(W.order(), false);
    for (std::size_t l = 0; l < S.dim(); ++l)
        for (std::size_t m = 0; m < S.dim(); ++m)
            for (std::size_t n = 0; n < S.dim(); ++n) S(l, m, n) = W(l + 1, m + 1, n + 1);
    return S;
}

// Reference physical tensors.
inline ExtensionTensor crmhd(const Scalar& beta_e = Scalar(1, 2))
{
    ExtensionTensor S(3, false);
    S.set_sym(2, 0, 1, -beta_e);
    return append_semisimple(S);
}

inline ExtensionTensor rmhd() { return append_semisimple(abelian(1)); }

// Three-field model in its original basis (not block diagonal).
inline ExtensionTensor three_field_mhd()
{
    ExtensionTensor W(3, false);
    const int w1[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const int w2[3][3] = {{0, 0, 0}, {1, 0, 1}, {0, 0, 0}};
    const int w3[3][3] = {{0, 0, 0}, {0, 1, 0}, {1, 0, 1}};
    for (std::size_t l = 0; l < 3; ++l)
        for (std::size_t m = 0; m < 3; ++m) {
            W(l, m, 0) = Scalar(w1[l][m]);
            W(l, m, 1) = Scalar(w2[l][m]);
            W(l, m, 2) = Scalar(w3[l][m]);
        }
    return W;
}

inline Matrix three_field_mhd_basis()
{
    return Matrix{{0, 0, 1}, {0, 1, 0}, {1, 0, -1}};
}

// ---------------------------------------------------------------------------
// Bracket evaluation over a pluggable base algebra
// ---------------------------------------------------------------------------

// Element type E needs E{} as zero, E + E, and Scalar * E.
template <class E, class Inner>
std::vector<E> bracket_eval(const ExtensionTensor& W, const std::vector<E>& a, const std::vector<E>& b, Inner inner)
{
    std::size_t d = W.dim();
    if (a.size() != d || b.size() != d) throw error(errc::dimension_mismatch, "tuple length does not match tensor");
    std::vector<E> r(d, E{});
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n) {
            bool any = false;
            for (std::size_t l = 0; l < d; ++l)
                if (!W(l, m, n).is_zero()) { any = true; break; }
            if (!any) continue;
            E ab = inner(a[m], b[n]);
            for (std::size_t l = 0; l < d; ++l)
                if (!W(l, m, n).is_zero()) r[l] = r[l] + W(l, m, n) * ab;
        }
    return r;
}

// Exact so(3) vectors with the cross product as bracket.
struct Vec3 {
    std::array<Scalar, 3> x{Scalar(0), Scalar(0), Scalar(0)};
    friend Vec3 operator+(const Vec3& a, const Vec3& b)
    {
        Vec3 r;
        for (int k = 0; k < 3; ++k) r.x[k] = a.x[k] + b.x[k];
        return r;
    }
    friend Vec3 operator*(const Scalar& s, const Vec3& a)
    {
        Vec3 r;
        for (int k = 0; k < 3; ++k) r.x[k] = s * a.x[k];
        return r;
    }
    friend bool operator==(const Vec3& a, const Vec3& b) { return a.x == b.x; }
    bool is_zero() const { return x[0].is_zero() && x[1].is_zero() && x[2].is_zero(); }
};

inline Vec3 so3_cross(const Vec3& a, const Vec3& b)
{
    Vec3 r;
    r.x[0] = a.x[1] * b.x[2] - a.x[2] * b.x[1];
    r.x[1] = a.x[2] * b.x[0] - a.x[0] * b.x[2];
    r.x[2] = a.x[0] * b.x[1] - a.x[1] * b.x[0];
    return r;
}

// Polynomial fields in (x, y) with the canonical bracket f_x g_y - f_y g_x.
struct Field2D {
    Polynomial p{2};
    friend Field2D operator+(const Field2D& a, const Field2D& b) { return {a.p + b.p}; }
    friend Field2D operator*(const Scalar& s, const Field2D& a) { return {s * a.p}; }
    friend bool operator==(const Field2D& a, const Field2D& b) { return a.p == b.p; }
    bool is_zero() const { return p.is_zero(); }
};

inline Field2D canonical_bracket(const Field2D& f, const Field2D& g)
{
    return {f.p.derivative(0) * g.p.derivative(1) - f.p.derivative(1) * g.p.derivative(0)};
}

} // namespace lpx
