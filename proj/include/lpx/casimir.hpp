#pragma once

// Casimir invariants of extension brackets: symbolic families generated from the
// coextension, exact verification, and quadratic Casimirs of finite-dimensional
// inner algebras.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "coextension.hpp"
#include "normalize.hpp"
#include "polynomial.hpp"

namespace lpx {

struct CasimirTerm {
    Scalar coeff;
    std::map<std::size_t, unsigned> monomial; // storage index -> exponent
    unsigned deriv = 0;

    friend bool operator==(const CasimirTerm& a, const CasimirTerm& b)
    {
        return a.coeff == b.coeff && a.monomial == b.monomial && a.deriv == b.deriv;
    }
};

// C = sum_i coeffs[i] * f^(i)(u.v) with a single argument form u, or
// coeffs[0] * h(u1.v, ..., ur.v) with several.
struct CasimirExpression {
    std::size_t family = 0;                // printed label of the seed
    std::size_t dim = 0;
    bool semidirect = false;               // labelling convention
    std::vector<std::vector<Scalar>> args; // linear forms over the dim coordinates
    std::vector<Polynomial> coeffs;

    std::size_t label(std::size_t k) const { return semidirect ? k : k + 1; }

    std::vector<CasimirTerm> terms() const
    {
        std::vector<CasimirTerm> out;
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (auto& [e, c] : coeffs[i].terms()) {
                CasimirTerm t{c, {}, static_cast<unsigned>(i)};
                for (std::size_t k = 0; k < e.size(); ++k)
                    if (e[k]) t.monomial[k] = e[k];
                out.push_back(std::move(t));
            }
        std::sort(out.begin(), out.end(), [](const CasimirTerm& a, const CasimirTerm& b) {
            if (a.deriv != b.deriv) return a.deriv < b.deriv;
            return a.monomial < b.monomial;
        });
        return out;
    }
};

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string coeff_prefix(const Scalar& c)
{
    if (c.is_one()) return "";
    if (c == Scalar(-1)) return "-";
    if (c.is_real() || sgn(c.re) == 0) return c.pretty() + " ";
    return "(" + c.pretty() + ") ";
}

inline std::string join_signed(const std::vector<std::string>& parts)
{
    std::string s;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const std::string& p = parts[k];
        if (k == 0) s = p;
        else if (!p.empty() && p[0] == '-') s += " - " + p.substr(1);
        else s += " + " + p;
    }
    return s.empty() ? "0" : s;
}

inline std::string primes(unsigned d)
{
    if (d <= 3) return std::string(d, '\'');
    return "^(" + std::to_string(d) + ")";
}

} // namespace detail

inline std::string render_linear_form(const std::vector<Scalar>& u, bool semidirect)
{
    std::vector<std::string> parts;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (u[k].is_zero()) continue;
        parts.push_back(detail::coeff_prefix(u[k]) + "v" + std::to_string(semidirect ? k : k + 1));
    }
    return detail::join_signed(parts);
}

inline std::string render_monomial(const std::map<std::size_t, unsigned>& mono, bool semidirect)
{
    std::string s;
    for (auto& [k, e] : mono) {
        if (!s.empty()) s += " ";
        std::string v = "v" + std::to_string(semidirect ? k : k + 1);
        s += e == 1 ? v : "(" + v + ")^" + std::to_string(e);
    }
    return s;
}

// e.g. "v1 f(v3) + 1/2 (v2)^2 f'(v3)"
inline std::string render(const CasimirExpression& c, const std::string& fname = "f")
{
    std::string argl;
    for (std::size_t a = 0; a < c.args.size(); ++a) {
        if (a) argl += ", ";
        argl += render_linear_form(c.args[a], c.semidirect);
    }
    std::vector<std::string> parts;
    for (auto& t : c.terms()) {
        std::string mono = render_monomial(t.monomial, c.semidirect);
        std::string fn = fname + detail::primes(t.deriv) + "(" + argl + ")";
        std::string pre = detail::coeff_prefix(t.coeff);
        if (mono.empty()) parts.push_back(pre + fn);
        else parts.push_back(pre + mono + " " + fn);
    }
    return detail::join_signed(parts);
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

inline bool casimir_condition_holds(const ExtensionTensor& W, const Polynomial& C)
{
    std::size_t d = W.dim();
    std::vector<std::vector<Polynomial>> H(d, std::vector<Polynomial>(d));
    for (std::size_t a = 0; a < d; ++a) {
        Polynomial da = C.derivative(a);
        for (std::size_t b = 0; b < d; ++b) H[a][b] = da.derivative(b);
    }
    for (std::size_t nu = 0; nu < d; ++nu)
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t s = l + 1; s < d; ++s) {
                Polynomial r(d);
                for (std::size_t m = 0; m < d; ++m) {
                    if (!W(l, m, nu).is_zero()) r += W(l, m, nu) * H[m][s];
                    if (!W(s, m, nu).is_zero()) r -= W(s, m, nu) * H[m][l];
                }
                if (!r.is_zero()) return false;
            }
    return true;
}

namespace detail {

inline Scalar falling_factorial(unsigned k, unsigned d)
{
    mpz_class r = 1;
    for (unsigned j = 0; j < d; ++j) r *= (k - j);
    return Scalar(mpq_class(r));
}

inline void exponent_tuples(std::size_t r, unsigned budget, std::vector<unsigned>& cur,
                            std::vector<std::vector<unsigned>>& out)
{
    if (cur.size() == r) {
        out.push_back(cur);
        return;
    }
    for (unsigned e = 0; e <= budget; ++e) {
        cur.push_back(e);
        exponent_tuples(r, budget - e, cur, out);
        cur.pop_back();
    }
}

} // namespace detail

// Substitutes f(s) = s^k for k = 0..kmax (products of powers for several
// arguments) and checks the condition as polynomial identities.
inline bool verify_casimir(const ExtensionTensor& W, const CasimirExpression& c, unsigned kmax)
{
    std::size_t d = W.dim();
    if (c.dim != d || c.args.empty()) return false;
    for (auto& u : c.args)
        if (u.size() != d) return false;
    std::vector<Polynomial> forms;
    for (auto& u : c.args) forms.push_back(Polynomial::linear(u));

    if (c.args.size() == 1) {
        const Polynomial& s = forms[0];
        for (unsigned k = 0; k <= kmax; ++k) {
            Polynomial C(d);
            for (unsigned i = 0; i < c.coeffs.size() && i <= k; ++i) {
                if (c.coeffs[i].is_zero()) continue;
                C += c.coeffs[i] * s.pow(k - i) * detail::falling_factorial(k, i);
            }
            if (!casimir_condition_holds(W, C)) return false;
        }
        return true;
    }
    for (std::size_t i = 1; i < c.coeffs.size(); ++i)
        if (!c.coeffs[i].is_zero()) return false; // derivatives of several arguments are undefined here
    std::vector<std::vector<unsigned>> tuples;
    std::vector<unsigned> cur;
    detail::exponent_tuples(forms.size(), kmax, cur, tuples);
    for (auto& t : tuples) {
        Polynomial C = c.coeffs.empty() ? Polynomial(d) : c.coeffs[0];
        for (std::size_t a = 0; a < t.size(); ++a) C = C * forms[a].pow(t[a]);
        if (!casimir_condition_holds(W, C)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Family generation
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<Scalar> unit(std::size_t d, std::size_t k)
{
    std::vector<Scalar> u(d, Scalar(0));
    u[k] = Scalar(1);
    return u;
}

// g_new = v^T H v / ((i+1) i) with H_ts = sum_m coW^m_ts d_m g_prev; coW index k
// lives on polynomial variable vars[k].
inline Polynomial coext_step(const Polynomial& g, const std::vector<Matrix>& coW,
                             const std::vector<std::size_t>& vars, std::size_t nv, unsigned i)
{
    std::size_t m = coW.size();
    std::vector<Polynomial> dg;
    for (std::size_t k = 0; k < m; ++k) dg.push_back(g.derivative(vars[k]));
    Polynomial out(nv);
    for (std::size_t t = 0; t < m; ++t)
        for (std::size_t s = 0; s < m; ++s) {
            Polynomial h(nv);
            for (std::size_t mu = 0; mu < m; ++mu)
                if (!coW[mu](t, s).is_zero()) h += coW[mu](t, s) * dg[mu];
            if (h.is_zero()) continue;
            out += h * Polynomial::variable(nv, vars[t]) * Polynomial::variable(nv, vars[s]);
        }
    return out * (Scalar(1) / Scalar(static_cast<long>((i + 1) * i)));
}

inline std::vector<Polynomial> coext_series(Polynomial g0, Polynomial g1, const std::vector<Matrix>& coW,
                                            const std::vector<std::size_t>& vars, std::size_t nv)
{
    std::vector<Polynomial> gs{std::move(g0)};
    if (g1.is_zero()) return gs;
    gs.push_back(std::move(g1));
    for (unsigned i = 2;; ++i) {
        if (i > nv + 2) throw error(errc::internal, "coextension recursion does not terminate");
        Polynomial next = coext_step(gs.back(), coW, vars, nv, i);
        if (next.is_zero()) break;
        gs.push_back(std::move(next));
    }
    return gs;
}

// Connected components of the coordinate graph linking l, m, n whenever W_l^{mn} != 0.
inline std::vector<std::vector<std::size_t>> components(const ExtensionTensor& S)
{
    std::size_t d = S.dim();
    std::vector<std::size_t> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](std::size_t a, std::size_t b) { parent[find(a)] = find(b); };
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n)
                if (!S(l, m, n).is_zero()) {
                    unite(l, m);
                    unite(l, n);
                }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < d; ++k) groups[find(k)].push_back(k);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, idx] : groups) out.push_back(idx);
    std::sort(out.begin(), out.end());
    return out;
}

inline ExtensionTensor restrict(const ExtensionTensor& S, const std::vector<std::size_t>& idx)
{
    std::size_t k = idx.size();
    ExtensionTensor R(k, false);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t m = 0; m < k; ++m)
            for (std::size_t n = 0; n < k; ++n) R(l, m, n) = S(idx[l], idx[m], idx[n]);
    return R;
}

// Polynomial families of a lower-triangular solvable tensor, in its own
// coordinates shifted by `shift` inside an nv-dimensional space. Seeds are
// returned with their storage index.
struct raw_family {
    std::size_t seed;
    std::vector<std::vector<Scalar>> args;
    std::vector<Polynomial> coeffs;
};

inline std::vector<raw_family> solvable_families(const ExtensionTensor& S, std::size_t shift, std::size_t nv)
{
    std::vector<raw_family> out;
    for (auto& comp : components(S)) {
        if (comp.size() < 2) continue;
        ExtensionTensor R = restrict(S, comp);
        Coextension c = coextension(R);
        std::vector<std::size_t> vars;
        for (std::size_t k = 0; k + 1 < comp.size(); ++k) vars.push_back(comp[k] + shift);
        std::vector<Scalar> arg = unit(nv, comp.back() + shift);

        std::vector<std::pair<std::size_t, std::vector<Scalar>>> seeds;
        if (!c.singular) {
            for (std::size_t k = 0; k < c.m; ++k) seeds.push_back({k, unit(c.m, k)});
        } else {
            Matrix chosen(0, c.m);
            for (std::size_t k = 0; k < c.m; ++k) {
                Matrix row(1, c.m);
                for (std::size_t j = 0; j < c.m; ++j) row(0, j) = c.projector(k, j);
                if (row.is_zero()) continue;
                Matrix trial = vstack<Scalar>({chosen, row}, c.m);
                if (rank(trial) == trial.rows()) {
                    chosen = trial;
                    seeds.push_back({k, row.data()});
                }
            }
        }
        for (auto& [k, row] : seeds) {
            std::vector<Scalar> lin(nv, Scalar(0));
            for (std::size_t j = 0; j < c.m; ++j) lin[vars[j]] = row[j];
            Polynomial g0 = Polynomial::linear(lin);
            Polynomial g1 = coext_step(g0, c.coW, vars, nv, 1);
            out.push_back({comp[k] + shift, {arg}, coext_series(g0, g1, c.coW, vars, nv)});
        }
    }
    // merged family over the joint kernel of the upper slices
    if (S.dim() > 0) {
        Matrix K = nullspace(vstack(S.upper_slices(), S.dim()));
        if (K.cols() > 0) {
            raw_family f{S.dim() - 1 + shift, {}, {Polynomial::constant(nv, Scalar(1))}};
            for (std::size_t j = 0; j < K.cols(); ++j) {
                std::vector<Scalar> u(nv, Scalar(0));
                for (std::size_t a = 0; a < S.dim(); ++a) u[a + shift] = K(a, j);
                f.args.push_back(u);
            }
            out.push_back(std::move(f));
        }
    }
    return out;
}

// Families of one block in lower-triangular normal form.
inline std::vector<raw_family> block_families(const ExtensionTensor& T)
{
    std::size_t d = T.dim();
    if (!T.semidirect()) return solvable_families(T, 0, d);

    ExtensionTensor S = strip_semisimple(T);
    std::size_t n = S.dim();
    std::vector<raw_family> out;
    if (n == 0) {
        out.push_back({0, {unit(d, 0)}, {Polynomial::constant(d, Scalar(1))}});
        return out;
    }
    auto in = coext_setup(S);
    if (rank(in.wn) == in.m) {
        Coextension c = coextension(S);
        Matrix winv = inverse(in.wn);
        std::vector<std::size_t> vars;
        for (std::size_t k = 0; k < in.m; ++k) vars.push_back(k + 1);
        Polynomial g1(d);
        for (std::size_t a = 0; a < in.m; ++a)
            for (std::size_t b = 0; b < in.m; ++b)
                if (!winv(a, b).is_zero())
                    g1 += (Scalar(1, 2) * winv(a, b)) * Polynomial::variable(d, a + 1) * Polynomial::variable(d, b + 1);
        out.push_back({0, {unit(d, d - 1)}, coext_series(Polynomial::variable(d, 0), g1, c.coW, vars, d)});
    }
    auto sf = solvable_families(S, 1, d);
    out.insert(out.end(), sf.begin(), sf.end());
    return out;
}

// v_old^a = sum_mu M(mu, a) v_new^mu
inline raw_family substitute(const raw_family& f, const Matrix& M)
{
    std::size_t nv = M.rows();
    std::vector<Polynomial> images;
    for (std::size_t a = 0; a < M.cols(); ++a) {
        std::vector<Scalar> col(nv);
        for (std::size_t mu = 0; mu < nv; ++mu) col[mu] = M(mu, a);
        images.push_back(Polynomial::linear(col));
    }
    raw_family g{f.seed, {}, {}};
    for (auto& p : f.coeffs) g.coeffs.push_back(p.compose(images));
    for (auto& u : f.args) {
        std::vector<Scalar> w(nv, Scalar(0));
        for (std::size_t mu = 0; mu < nv; ++mu)
            for (std::size_t a = 0; a < u.size(); ++a)
                if (!u[a].is_zero()) w[mu] += M(mu, a) * u[a];
        g.args.push_back(w);
    }
    return g;
}

inline std::vector<CasimirExpression> finish(const ExtensionTensor& W, std::vector<raw_family> raw)
{
    std::vector<CasimirExpression> out;
    unsigned kmax = static_cast<unsigned>(std::max<std::size_t>(4, W.order()));
    for (auto& r : raw) {
        CasimirExpression c;
        c.dim = W.dim();
        c.semidirect = W.semidirect();
        c.family = c.label(r.seed);
        c.args = std::move(r.args);
        c.coeffs = std::move(r.coeffs);
        if (!verify_casimir(W, c, kmax))
            throw error(errc::internal, "generated family fails the Casimir condition: " + render(c));
        out.push_back(std::move(c));
    }
    return out;
}

inline bool coextension_failure(const error& e)
{
    return e.code() == errc::solvability_failed || e.code() == errc::coext_condition_failed;
}

inline std::vector<CasimirExpression> families_via_pipeline(const ExtensionTensor& W, std::uint64_t seed)
{
    std::size_t d = W.dim();
    auto split = split_blocks(W, seed);
    Matrix S0 = split.change.M;
    std::vector<std::pair<BlockPiece, NormalForm>> forms;
    std::vector<std::vector<raw_family>> local;
    // A solvable block whose coextension fails is a direct sum; split it into ideals and retry.
    std::vector<BlockPiece> work(split.blocks.rbegin(), split.blocks.rend());
    while (!work.empty()) {
        BlockPiece piece = std::move(work.back());
        work.pop_back();
        NormalForm nf = normal_form(piece.tensor);
        try {
            local.push_back(block_families(nf.tensor));
            forms.push_back({piece, nf});
            continue;
        } catch (const error& e) {
            if (!coextension_failure(e) || piece.tensor.semidirect()) throw;
            SplitResult sub = ideal_split(piece.tensor, seed);
            if (sub.blocks.size() < 2) throw;
            Matrix E = Matrix::identity(d);
            for (std::size_t i = 0; i < piece.size; ++i)
                for (std::size_t j = 0; j < piece.size; ++j) E(piece.offset + i, piece.offset + j) = sub.change.M(i, j);
            S0 = S0 * E;
            for (auto it = sub.blocks.rbegin(); it != sub.blocks.rend(); ++it)
                work.push_back({it->tensor, piece.offset + it->offset, it->size});
        }
    }
    Matrix D = Matrix::identity(d);
    for (auto& [piece, nf] : forms)
        for (std::size_t a = 0; a < piece.size; ++a)
            for (std::size_t b = 0; b < piece.size; ++b) D(piece.offset + a, piece.offset + b) = nf.change.M(a, b);
    Matrix M = S0 * D;
    std::vector<raw_family> raw;
    for (std::size_t k = 0; k < forms.size(); ++k) {
        const BlockPiece& piece = forms[k].first;
        Matrix E(d, piece.size); // block coordinates inside the global ones
        for (std::size_t a = 0; a < piece.size; ++a) E(piece.offset + a, a) = Scalar(1);
        Matrix ME = M * E;
        for (auto& f : local[k]) {
            raw_family g = substitute(f, ME);
            g.seed += piece.offset;
            raw.push_back(std::move(g));
        }
    }
    // kernel families of different solvable blocks combine into one
    std::vector<raw_family> merged;
    std::size_t null_at = SIZE_MAX;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        auto& f = raw[k];
        std::size_t bi = 0;
        for (std::size_t b = 0; b < forms.size(); ++b)
            if (f.seed >= forms[b].first.offset && f.seed < forms[b].first.offset + forms[b].first.size) bi = b;
        bool kernel = f.coeffs.size() == 1 && f.coeffs[0] == Polynomial::constant(d, Scalar(1)) &&
                      !forms[bi].second.tensor.semidirect();
        if (!kernel) {
            merged.push_back(std::move(f));
            continue;
        }
        if (null_at == SIZE_MAX) {
            null_at = merged.size();
            merged.push_back(std::move(f));
            merged.back().seed = d - 1;
        } else {
            auto& nf = merged[null_at];
            nf.args.insert(nf.args.end(), f.args.begin(), f.args.end());
        }
    }
    return finish(W, std::move(merged));
}

} // namespace detail

// Tensors already in lower-triangular normal form are handled in their own
// coordinates; anything else goes through the block pipeline and the families
// are pulled back to the input coordinates.
inline std::vector<CasimirExpression> casimir_families(const ExtensionTensor& W, std::uint64_t seed = 0)
{
    if (!validate(W).all_pass()) throw error(errc::not_applicable, "tensor fails the extension axioms");
    bool normal = W.semidirect() ? is_normalized_semidirect(W) : is_lower_triangular_solvable(W);
    if (normal) {
        try {
            return detail::finish(W, detail::block_families(W));
        } catch (const error& e) {
            // lower triangular but not normalized: let the pipeline split and normalize
            if (!detail::coextension_failure(e)) throw;
        }
    }
    return detail::families_via_pipeline(W, seed);
}

// Closed form for the Leibniz extension; nu = 0 needs the semidirect form and
// nu = n is the pure f(v^n) family.
inline CasimirExpression leibniz_casimirs(std::size_t n, std::size_t nu, bool semidirect = false)
{
    if (n < 1 || nu > n || (nu == 0 && !semidirect)) throw error(errc::index_out_of_range, "family index out of range");
    std::size_t d = semidirect ? n + 1 : n;
    auto var = [&](std::size_t label) { return semidirect ? label : label - 1; };
    CasimirExpression c;
    c.dim = d;
    c.semidirect = semidirect;
    c.family = nu;
    c.args = {detail::unit(d, var(n))};
    if (nu == n) {
        c.coeffs = {Polynomial::constant(d, Scalar(1))};
        return c;
    }
    std::size_t lo = semidirect ? 0 : 1;
    // power[s] = sum over ordered tuples of labels in lo..n-1 with sum s of the monomial
    std::map<std::size_t, Polynomial> power{{0, Polynomial::constant(d, Scalar(1))}};
    mpz_class fact = 1;
    for (std::size_t k = 1; k <= n - nu; ++k) {
        std::map<std::size_t, Polynomial> next;
        for (auto& [s, p] : power)
            for (std::size_t t = lo; t < n; ++t) {
                auto it = next.try_emplace(s + t, Polynomial(d)).first;
                it->second += p * Polynomial::variable(d, var(t));
            }
        power = std::move(next);
        fact *= static_cast<unsigned long>(k);
        std::size_t target = nu + (k - 1) * n;
        auto it = power.find(target);
        Polynomial term = it == power.end() ? Polynomial(d) : it->second * Scalar(mpq_class(1, fact));
        c.coeffs.push_back(term);
    }
    while (c.coeffs.size() > 1 && c.coeffs.back().is_zero()) c.coeffs.pop_back();
    return c;
}

// ---------------------------------------------------------------------------
// Finite-dimensional inner algebras
// ---------------------------------------------------------------------------

struct LieAlgebraSpec {
    std::size_t dim = 0;
    std::vector<Scalar> c; // c[(i*dim + j)*dim + k] = c_ij^k

    Scalar& at(std::size_t i, std::size_t j, std::size_t k) { return c[(i * dim + j) * dim + k]; }
    const Scalar& at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * dim + j) * dim + k]; }

    static LieAlgebraSpec so3()
    {
        LieAlgebraSpec a;
        a.dim = 3;
        a.c.assign(27, Scalar(0));
        for (std::size_t i = 0; i < 3; ++i) {
            std::size_t j = (i + 1) % 3, k = (i + 2) % 3;
            a.at(i, j, k) = Scalar(1);
            a.at(j, i, k) = Scalar(-1);
        }
        return a;
    }

    // g_ij = c_is^t c_jt^s
    Matrix killing() const
    {
        Matrix g(dim, dim);
        for (std::size_t i = 0; i < dim; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                for (std::size_t s = 0; s < dim; ++s)
                    for (std::size_t t = 0; t < dim; ++t) g(i, j) += at(i, s, t) * at(j, t, s);
        return g;
    }
};

// Basis of symmetric C with W_l^{mn} C_ms = W_s^{mn} C_ml.
inline std::vector<Matrix> quadratic_casimirs_findim(const ExtensionTensor& W, const LieAlgebraSpec& alg)
{
    if (rank(alg.killing()) < alg.dim) throw error(errc::not_semisimple, "Killing form is singular");
    std::size_t d = W.dim();
    std::vector<std::pair<std::size_t, std::size_t>> unk;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> col;
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a; b < d; ++b) {
            col[{a, b}] = unk.size();
            unk.push_back({a, b});
        }
    auto cidx = [&](std::size_t a, std::size_t b) { return col.at({std::min(a, b), std::max(a, b)}); };
    std::vector<std::vector<Scalar>> rows;
    for (std::size_t nu = 0; nu < d; ++nu)
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t s = l + 1; s < d; ++s) {
                std::vector<Scalar> r(unk.size(), Scalar(0));
                for (std::size_t m = 0; m < d; ++m) {
                    r[cidx(m, s)] += W(l, m, nu);
                    r[cidx(m, l)] -= W(s, m, nu);
                }
                if (std::any_of(r.begin(), r.end(), [](const Scalar& x) { return !x.is_zero(); })) rows.push_back(r);
            }
    Matrix A(rows.size(), unk.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < unk.size(); ++j) A(i, j) = rows[i][j];
    Matrix N = rows.empty() ? Matrix::identity(unk.size()) : nullspace(A);
    std::vector<Matrix> out;
    for (std::size_t j = 0; j < N.cols(); ++j) {
        Matrix C(d, d);
        for (std::size_t k = 0; k < unk.size(); ++k) {
            C(unk[k].first, unk[k].second) = N(k, j);
            C(unk[k].second, unk[k].first) = N(k, j);
        }
        out.push_back(C);
    }
    return out;
}

} // namespace lpx
