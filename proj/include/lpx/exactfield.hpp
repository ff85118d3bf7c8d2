#pragma once

// Exact arithmetic over the Gaussian rationals Q(i) and dense matrices over it.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lpx {

// ---------------------------------------------------------------------------
// Scalar
// ---------------------------------------------------------------------------

class Scalar {
public:
    mpq_class re{0};
    mpq_class im{0};

    Scalar() = default;
    Scalar(int v) : re(v) {}
    Scalar(long v) : re(v) {}
    Scalar(const mpq_class& r) : re(r) {}
    Scalar(const mpq_class& r, const mpq_class& i) : re(r), im(i) {}
    Scalar(long num, long den) : re(num, den) { re.canonicalize(); }

    static Scalar imag_unit() { return Scalar(mpq_class(0), mpq_class(1)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    bool is_one() const { return re == 1 && sgn(im) == 0; }

    Scalar conj() const { return Scalar(re, -im); }
    mpq_class norm() const { return re * re + im * im; }

    Scalar operator-() const { return Scalar(-re, -im); }

    Scalar& operator+=(const Scalar& o) { re += o.re; im += o.im; return *this; }
    Scalar& operator-=(const Scalar& o) { re -= o.re; im -= o.im; return *this; }
    Scalar& operator*=(const Scalar& o)
    {
        if (sgn(im) == 0 && sgn(o.im) == 0) {
            re *= o.re;
            return *this;
        }
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    Scalar& operator/=(const Scalar& o)
    {
        if (o.is_zero())
            throw error(errc::singular_matrix, "division by zero scalar");
        if (sgn(o.im) == 0) {
            re /= o.re;
            im /= o.re;
            return *this;
        }
        mpq_class d = o.norm();
        mpq_class r = (re * o.re + im * o.im) / d;
        mpq_class i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    // Canonical text form: "p/q" or "p/q+r/s*i"; 0 and 1 are written bare.
    std::string str() const
    {
        auto part = [](const mpq_class& q) {
            if (sgn(q) == 0) return std::string("0");
            if (q == 1) return std::string("1");
            return q.get_num().get_str() + "/" + q.get_den().get_str();
        };
        std::string s = part(re);
        if (sgn(im) != 0) {
            mpq_class a = abs(im);
            s += (sgn(im) > 0 ? "+" : "-");
            s += part(a) + "*i";
        }
        return s;
    }

    // Human-facing form: integers without a denominator.
    std::string pretty() const
    {
        auto part = [](const mpq_class& q) {
            return q.get_den() == 1 ? q.get_num().get_str() : q.get_num().get_str() + "/" + q.get_den().get_str();
        };
        if (sgn(im) == 0) return part(re);
        std::string s = sgn(re) == 0 ? "" : part(re);
        mpq_class a = abs(im);
        if (sgn(im) < 0) s += "-";
        else if (!s.empty()) s += "+";
        s += a == 1 ? "i" : part(a) + "*i";
        return s;
    }

    double real_double() const { return re.get_d(); }
    double imag_double() const { return im.get_d(); }

    static Scalar parse(std::string_view text);
};

namespace detail {

inline mpq_class parse_rational(std::string_view t, std::string_view whole)
{
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    if (t.empty()) throw error(errc::parse_error, "empty rational in '" + std::string(whole) + "'");
    std::size_t slash = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        char c = t[k];
        bool ok = (c >= '0' && c <= '9') || (c == '-' && k == 0) || c == '/';
        if (!ok) throw error(errc::parse_error, "bad scalar '" + std::string(whole) + "'");
        if (c == '/') ++slash;
    }
    if (slash > 1) throw error(errc::parse_error, "bad scalar '" + std::string(whole) + "'");
    mpq_class q;
    if (q.set_str(std::string(t), 10) != 0)
        throw error(errc::parse_error, "bad scalar '" + std::string(whole) + "'");
    if (sgn(q.get_den()) == 0)
        throw error(errc::parse_error, "zero denominator in '" + std::string(whole) + "'");
    q.canonicalize();
    return q;
}

} // namespace detail

inline Scalar Scalar::parse(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (c != ' ' && c != '\t') s.push_back(c);
    if (s.empty()) throw error(errc::parse_error, "empty scalar");
    if (s.back() != 'i') return Scalar(detail::parse_rational(s, text));
    s.pop_back();
    if (!s.empty() && s.back() == '*') s.pop_back();
    // split at the last sign that is not the leading character
    std::size_t pos = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if (s[k] == '+' || s[k] == '-') { pos = k; break; }
    std::string rs, is;
    if (pos == std::string::npos) {
        is = s;
    } else {
        rs = s.substr(0, pos);
        is = s.substr(pos);
    }
    mpq_class r = rs.empty() ? mpq_class(0) : detail::parse_rational(rs, text);
    mpq_class i;
    if (is.empty() || is == "+") i = 1;
    else if (is == "-") i = -1;
    else i = detail::parse_rational(is, text);
    return Scalar(r, i);
}

// Total order used for deterministic sorting: real part, then imaginary part.
inline bool scalar_less(const Scalar& a, const Scalar& b)
{
    if (a.re != b.re) return a.re < b.re;
    return a.im < b.im;
}

// ---------------------------------------------------------------------------
// Dense matrix
// ---------------------------------------------------------------------------

template <class T>
class basic_matrix {
public:
    basic_matrix() = default;
    basic_matrix(std::size_t r, std::size_t c) : r_(r), c_(c), a_(r * c, T(0)) {}
    basic_matrix(std::initializer_list<std::initializer_list<T>> rows)
    {
        r_ = rows.size();
        c_ = r_ ? rows.begin()->size() : 0;
        a_.reserve(r_ * c_);
        for (auto& row : rows) {
            if (row.size() != c_) throw error(errc::dimension_mismatch, "ragged matrix literal");
            for (auto& x : row) a_.push_back(x);
        }
    }

    static basic_matrix identity(std::size_t n)
    {
        basic_matrix m(n, n);
        for (std::size_t k = 0; k < n; ++k) m(k, k) = T(1);
        return m;
    }

    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }
    bool square() const { return r_ == c_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

    bool is_zero() const
    {
        return std::all_of(a_.begin(), a_.end(), [](const T& x) { return x.is_zero(); });
    }

    basic_matrix transpose() const
    {
        basic_matrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    basic_matrix conj_transpose() const
    {
        basic_matrix t(c_, r_);
        for (std::size_t i = 0; i < r_; ++i)
            for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j).conj();
        return t;
    }

    basic_matrix column(std::size_t j) const
    {
        basic_matrix v(r_, 1);
        for (std::size_t i = 0; i < r_; ++i) v(i, 0) = (*this)(i, j);
        return v;
    }

    basic_matrix select(const std::vector<std::size_t>& ri, const std::vector<std::size_t>& ci) const
    {
        basic_matrix m(ri.size(), ci.size());
        for (std::size_t i = 0; i < ri.size(); ++i)
            for (std::size_t j = 0; j < ci.size(); ++j) m(i, j) = (*this)(ri[i], ci[j]);
        return m;
    }

    basic_matrix& operator+=(const basic_matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    basic_matrix& operator-=(const basic_matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    basic_matrix& operator*=(const T& s)
    {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend basic_matrix operator+(basic_matrix a, const basic_matrix& b) { return a += b; }
    friend basic_matrix operator-(basic_matrix a, const basic_matrix& b) { return a -= b; }
    friend basic_matrix operator*(basic_matrix a, const T& s) { return a *= s; }
    friend basic_matrix operator*(const T& s, basic_matrix a) { return a *= s; }

    friend basic_matrix operator*(const basic_matrix& a, const basic_matrix& b)
    {
        if (a.c_ != b.r_) throw error(errc::dimension_mismatch, "matrix product shape");
        basic_matrix m(a.r_, b.c_);
        for (std::size_t i = 0; i < a.r_; ++i)
            for (std::size_t k = 0; k < a.c_; ++k) {
                const T& x = a(i, k);
                if (x.is_zero()) continue;
                for (std::size_t j = 0; j < b.c_; ++j)
                    if (!b(k, j).is_zero()) m(i, j) += x * b(k, j);
            }
        return m;
    }

    friend bool operator==(const basic_matrix& a, const basic_matrix& b)
    {
        return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_;
    }
    friend bool operator!=(const basic_matrix& a, const basic_matrix& b) { return !(a == b); }

    const std::vector<T>& data() const { return a_; }

private:
    void check_same(const basic_matrix& o) const
    {
        if (r_ != o.r_ || c_ != o.c_) throw error(errc::dimension_mismatch, "matrix shapes differ");
    }

    std::size_t r_ = 0, c_ = 0;
    std::vector<T> a_;
};

using Matrix = basic_matrix<Scalar>;

template <class T>
basic_matrix<T> hstack(const std::vector<basic_matrix<T>>& parts, std::size_t rows)
{
    std::size_t c = 0;
    for (auto& p : parts) c += p.cols();
    basic_matrix<T> m(rows, c);
    std::size_t off = 0;
    for (auto& p : parts) {
        if (p.rows() != rows) throw error(errc::dimension_mismatch, "hstack row count");
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < p.cols(); ++j) m(i, off + j) = p(i, j);
        off += p.cols();
    }
    return m;
}

template <class T>
basic_matrix<T> vstack(const std::vector<basic_matrix<T>>& parts, std::size_t cols)
{
    std::size_t r = 0;
    for (auto& p : parts) r += p.rows();
    basic_matrix<T> m(r, cols);
    std::size_t off = 0;
    for (auto& p : parts) {
        if (p.cols() != cols) throw error(errc::dimension_mismatch, "vstack column count");
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < cols; ++j) m(off + i, j) = p(i, j);
        off += p.rows();
    }
    return m;
}

template <class T>
T trace(const basic_matrix<T>& a)
{
    T t(0);
    for (std::size_t k = 0; k < std::min(a.rows(), a.cols()); ++k) t += a(k, k);
    return t;
}

template <class T>
basic_matrix<T> power(const basic_matrix<T>& a, std::size_t k)
{
    basic_matrix<T> r = basic_matrix<T>::identity(a.rows());
    for (std::size_t s = 0; s < k; ++s) r = r * a;
    return r;
}

template <class T>
bool is_strictly_lower(const basic_matrix<T>& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i; j < a.cols(); ++j)
            if (!a(i, j).is_zero()) return false;
    return true;
}

template <class T>
bool is_lower(const basic_matrix<T>& a)
{
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (!a(i, j).is_zero()) return false;
    return true;
}

template <class T>
bool is_nilpotent(const basic_matrix<T>& a)
{
    return power(a, a.rows()).is_zero();
}

// ---------------------------------------------------------------------------
// Elimination
// ---------------------------------------------------------------------------

template <class T>
struct rref_result {
    basic_matrix<T> R;
    std::size_t rank = 0;
    std::vector<std::size_t> pivots;
};

template <class T>
rref_result<T> rref(basic_matrix<T> a)
{
    rref_result<T> out;
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t p = row;
        while (p < a.rows() && a(p, col).is_zero()) ++p;
        if (p == a.rows()) continue;
        if (p != row)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(p, j), a(row, j));
        T inv = T(1) / a(row, col);
        for (std::size_t j = col; j < a.cols(); ++j) a(row, j) *= inv;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == row || a(i, col).is_zero()) continue;
            T f = a(i, col);
            for (std::size_t j = col; j < a.cols(); ++j)
                if (!a(row, j).is_zero()) a(i, j) -= f * a(row, j);
        }
        out.pivots.push_back(col);
        ++row;
    }
    out.rank = out.pivots.size();
    out.R = std::move(a);
    return out;
}

template <class T>
std::size_t rank(const basic_matrix<T>& a)
{
    return rref(a).rank;
}

// Columns of the returned matrix form a basis of {x : a x = 0}, one per free column,
// ordered by free-column index.
template <class T>
basic_matrix<T> nullspace(const basic_matrix<T>& a)
{
    auto r = rref(a);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : r.pivots) is_pivot[p] = true;
    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < a.cols(); ++j)
        if (!is_pivot[j]) free.push_back(j);
    basic_matrix<T> ns(a.cols(), free.size());
    for (std::size_t k = 0; k < free.size(); ++k) {
        ns(free[k], k) = T(1);
        for (std::size_t i = 0; i < r.rank; ++i) ns(r.pivots[i], k) = -r.R(i, free[k]);
    }
    return ns;
}

template <class T>
basic_matrix<T> inverse(const basic_matrix<T>& a)
{
    if (!a.square()) throw error(errc::dimension_mismatch, "inverse of non-square matrix");
    std::size_t n = a.rows();
    auto r = rref(hstack<T>({a, basic_matrix<T>::identity(n)}, n));
    for (std::size_t k = 0; k < n; ++k)
        if (k >= r.rank || r.pivots[k] != k) throw error(errc::singular_matrix, "matrix is not invertible");
    std::vector<std::size_t> ri(n), ci(n);
    std::iota(ri.begin(), ri.end(), 0);
    std::iota(ci.begin(), ci.end(), n);
    return r.R.select(ri, ci);
}

// Greedy choice of columns that increase rank, scanned left to right.
template <class T>
std::vector<std::size_t> independent_columns(const basic_matrix<T>& a)
{
    return rref(a).pivots;
}

// Moore-Penrose inverse from the rank factorization A = F G.
template <class T>
basic_matrix<T> pseudoinverse(const basic_matrix<T>& a)
{
    auto r = rref(a);
    if (r.rank == 0) return basic_matrix<T>(a.cols(), a.rows());
    std::vector<std::size_t> all_rows(a.rows()), all_cols(a.cols()), top(r.rank);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    std::iota(top.begin(), top.end(), 0);
    basic_matrix<T> F = a.select(all_rows, r.pivots);
    basic_matrix<T> G = r.R.select(top, all_cols);
    basic_matrix<T> Gh = G.conj_transpose();
    basic_matrix<T> Fh = F.conj_transpose();
    return Gh * inverse(G * Gh) * inverse(Fh * F) * Fh;
}

template <class T>
bool commute(const basic_matrix<T>& a, const basic_matrix<T>& b)
{
    return a * b == b * a;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial and Gaussian-rational roots
// ---------------------------------------------------------------------------

// Coefficients c[0..n] of det(xI - A), c[n] = 1 (Faddeev-LeVerrier).
template <class T>
std::vector<T> charpoly(const basic_matrix<T>& a)
{
    std::size_t n = a.rows();
    std::vector<T> c(n + 1, T(0));
    c[n] = T(1);
    basic_matrix<T> M(n, n);
    basic_matrix<T> I = basic_matrix<T>::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        M = a * M + c[n - k + 1] * I;
        c[n - k] = -trace(a * M) / T(static_cast<long>(k));
    }
    return c;
}

namespace detail {

inline Scalar eval_poly(const std::vector<Scalar>& c, const Scalar& x)
{
    Scalar acc(0);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
    return acc;
}

// Divide by (x - r), dropping the remainder.
inline std::vector<Scalar> deflate(const std::vector<Scalar>& c, const Scalar& r)
{
    std::size_t d = c.size() - 1;
    std::vector<Scalar> q(d, Scalar(0));
    Scalar carry(0);
    for (std::size_t k = d; k-- > 0;) {
        carry = c[k + 1] + carry * r;
        q[k] = carry;
    }
    return q;
}

inline mpz_class lcm_den(const std::vector<Scalar>& c)
{
    mpz_class l = 1;
    for (auto& s : c) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.re.get_den().get_mpz_t());
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), s.im.get_den().get_mpz_t());
    }
    return l;
}

} // namespace detail

// All roots, with multiplicity, of a monic polynomial when it splits over Q(i).
// Throws irrational_spectrum otherwise. Roots come back sorted.
inline std::vector<Scalar> gaussian_rational_roots(std::vector<Scalar> c)
{
    std::vector<Scalar> roots;
    while (c.size() > 1) {
        if (c[0].is_zero()) {
            roots.emplace_back(0);
            c.erase(c.begin());
            continue;
        }
        std::size_t d = c.size() - 1;
        mpz_class D = detail::lcm_den(c);
        // integral monic polynomial in y = D x
        std::vector<Scalar> ci(d + 1);
        mpz_class pw = 1;
        for (std::size_t k = d + 1; k-- > 0;) {
            ci[k] = c[k] * Scalar(mpq_class(pw));
            pw *= D;
        }
        // the mean of the roots is a root whenever the spectrum is a single point
        Scalar mean = Scalar(0) - ci[d - 1] / Scalar(static_cast<long>(d));
        if (detail::eval_poly(ci, mean).is_zero()) {
            roots.push_back(mean / Scalar(mpq_class(D)));
            c = detail::deflate(c, roots.back());
            continue;
        }
        mpq_class n0q = ci[0].norm();
        mpz_class N0 = n0q.get_num();
        mpz_class T;
        mpz_root(T.get_mpz_t(), N0.get_mpz_t(), static_cast<unsigned long>(d));
        mpz_class Rz;
        mpz_sqrt(Rz.get_mpz_t(), T.get_mpz_t());
        if (!Rz.fits_slong_p() || Rz > 200000)
            throw error(errc::irrational_spectrum, "spectrum search bound too large");
        long R = Rz.get_si();
        bool found = false;
        Scalar root;
        for (long rad = 1; rad <= T && !found; ++rad) {
            // enumerate lattice points of norm exactly rad
            if (N0 % rad != 0) continue;
            for (long a = -R; a <= R && !found; ++a) {
                long rem = rad - a * a;
                if (rem < 0) continue;
                mpz_class bz;
                mpz_class rz = rem;
                mpz_sqrt(bz.get_mpz_t(), rz.get_mpz_t());
                if (bz * bz != rem) continue;
                long b = bz.get_si();
                for (long sb : {b, -b}) {
                    Scalar y{mpq_class(a), mpq_class(sb)};
                    if (detail::eval_poly(ci, y).is_zero()) {
                        root = y / Scalar(mpq_class(D));
                        found = true;
                        break;
                    }
                    if (b == 0) break;
                }
            }
        }
        if (!found) throw error(errc::irrational_spectrum, "characteristic polynomial does not split over Q(i)");
        roots.push_back(root);
        c = detail::deflate(c, root);
    }
    std::sort(roots.begin(), roots.end(), scalar_less);
    return roots;
}

// ---------------------------------------------------------------------------
// Deterministic small-integer generator shared by the randomized procedures.
// The mapping from the engine output is fixed so results are identical on
// every platform.
// ---------------------------------------------------------------------------

class seeded_rng {
public:
    explicit seeded_rng(std::uint64_t seed) : g_(seed) {}
    long uniform(long lo, long hi) { return lo + static_cast<long>(g_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::mt19937_64 g_;
};

// ---------------------------------------------------------------------------
// Structural decompositions
// ---------------------------------------------------------------------------

inline void require_commuting(const std::vector<Matrix>& ws)
{
    for (std::size_t a = 0; a < ws.size(); ++a) {
        if (!ws[a].square() || ws[a].rows() != ws[0].rows())
            throw error(errc::dimension_mismatch, "matrices must be square and of equal size");
        for (std::size_t b = a + 1; b < ws.size(); ++b)
            if (!commute(ws[a], ws[b]))
                throw error(errc::non_commuting, "inputs " + std::to_string(a) + " and " + std::to_string(b) + " do not commute");
    }
}

struct block_decomposition {
    Matrix M;                                   // columns: adapted basis
    std::vector<std::size_t> sizes;             // block sizes in order
    std::vector<std::vector<Scalar>> eigen;     // per block, eigenvalue of each input
};

namespace detail {

inline bool single_eigenvalue(const Matrix& b, Scalar& alpha)
{
    std::size_t s = b.rows();
    alpha = trace(b) / Scalar(static_cast<long>(s));
    return is_nilpotent(b - alpha * Matrix::identity(s));
}

inline bool lex_less(const std::vector<Scalar>& a, const std::vector<Scalar>& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), scalar_less);
}

} // namespace detail

// Generalized eigenspaces of a seeded generic combination of the inputs, so that
// every input is block diagonal with one eigenvalue per block.
inline block_decomposition simultaneous_block_diagonalize(const std::vector<Matrix>& ws, std::uint64_t seed = 0)
{
    if (ws.empty()) throw error(errc::dimension_mismatch, "no matrices supplied");
    require_commuting(ws);
    std::size_t n = ws[0].rows();
    seeded_rng rng(seed);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Matrix G(n, n);
        for (auto& w : ws) G += Scalar(rng.uniform(1, 16)) * w;
        auto roots = gaussian_rational_roots(charpoly(G));
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        std::vector<Matrix> spaces;
        for (auto& lam : roots) spaces.push_back(nullspace(power(G - lam * Matrix::identity(n), n)));
        Matrix M = hstack(spaces, n);
        Matrix Mi = inverse(M);
        struct blk {
            std::size_t off, size;
            std::vector<Scalar> eig;
            std::vector<Scalar> entries;
        };
        std::vector<blk> blocks;
        bool ok = true;
        std::size_t off = 0;
        std::vector<Matrix> conj;
        for (auto& w : ws) conj.push_back(Mi * w * M);
        for (auto& sp : spaces) {
            blk b{off, sp.cols(), {}, {}};
            std::vector<std::size_t> idx(b.size);
            std::iota(idx.begin(), idx.end(), off);
            for (auto& cw : conj) {
                Matrix sub = cw.select(idx, idx);
                Scalar alpha;
                if (!detail::single_eigenvalue(sub, alpha)) { ok = false; break; }
                b.eig.push_back(alpha);
                b.entries.insert(b.entries.end(), sub.data().begin(), sub.data().end());
            }
            if (!ok) break;
            blocks.push_back(std::move(b));
            off += sp.cols();
        }
        if (!ok) continue;
        std::stable_sort(blocks.begin(), blocks.end(), [](const blk& x, const blk& y) {
            if (x.size != y.size) return x.size > y.size;
            if (x.eig != y.eig) return detail::lex_less(x.eig, y.eig);
            return detail::lex_less(x.entries, y.entries);
        });
        block_decomposition out;
        std::vector<Matrix> cols;
        for (auto& b : blocks) {
            std::vector<std::size_t> all(n), idx(b.size);
            std::iota(all.begin(), all.end(), 0);
            std::iota(idx.begin(), idx.end(), b.off);
            cols.push_back(M.select(all, idx));
            out.sizes.push_back(b.size);
            out.eigen.push_back(b.eig);
        }
        out.M = hstack(cols, n);
        return out;
    }
    throw error(errc::internal, "no generic combination separated the joint spectrum in 8 draws");
}

// Basis adapted to the joint kernel flag K1 < K2 < ..., outer layer first, so
// that every input becomes strictly lower triangular.
inline Matrix common_lower_triangularize(const std::vector<Matrix>& ns)
{
    if (ns.empty()) throw error(errc::dimension_mismatch, "no matrices supplied");
    require_commuting(ns);
    std::size_t n = ns[0].rows();
    for (std::size_t k = 0; k < ns.size(); ++k)
        if (!is_nilpotent(ns[k])) throw error(errc::not_nilpotent, "input " + std::to_string(k) + " is not nilpotent");
    if (std::all_of(ns.begin(), ns.end(), [](const Matrix& m) { return is_strictly_lower(m); }))
        return Matrix::identity(n);

    std::vector<Matrix> layers;
    Matrix basis(n, 0);
    Matrix annih = Matrix::identity(n); // rows span the annihilator of the current K
    while (basis.cols() < n) {
        std::vector<Matrix> stack;
        for (auto& N : ns) stack.push_back(annih * N);
        Matrix K = nullspace(vstack(stack, n));
        std::vector<Matrix> added;
        Matrix cur = basis;
        for (std::size_t j = 0; j < K.cols(); ++j) {
            Matrix trial = hstack<Scalar>({cur, K.column(j)}, n);
            if (rank(trial) > cur.cols()) {
                cur = trial;
                added.push_back(K.column(j));
            }
        }
        if (added.empty()) throw error(errc::internal, "joint kernel flag stalled");
        layers.push_back(hstack(added, n));
        basis = cur;
        annih = nullspace(basis.transpose()).transpose();
        if (annih.rows() == 0) annih = Matrix(0, n);
    }
    std::reverse(layers.begin(), layers.end());
    Matrix M = hstack(layers, n);
    Matrix Mi = inverse(M);
    for (auto& N : ns)
        if (!is_strictly_lower(Mi * N * M)) throw error(errc::internal, "flag basis failed to triangularize");
    return M;
}

} // namespace lpx
