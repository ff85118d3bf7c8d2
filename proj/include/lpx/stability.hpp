#pragma once

// Grid evaluation of closed-form equilibria and formal-stability conditions.
// Sufficient conditions only: a failed check means "not provably stable".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "error.hpp"

namespace lpx {

// x in [0, 2 pi) periodic, y in [-Ly, Ly] including both ends; values row-major in y.
struct FieldGrid {
    std::size_t nx = 0, ny = 0;
    double Ly = std::numbers::pi;
    std::vector<double> values;

    FieldGrid() = default;
    FieldGrid(std::size_t nx_, std::size_t ny_, double Ly_ = std::numbers::pi)
        : nx(nx_), ny(ny_), Ly(Ly_), values(nx_ * ny_, 0.0)
    {
        if (nx < 4 || ny < 4 || !(Ly > 0)) throw error(errc::bad_parameter, "grid needs at least 4 points per axis and Ly > 0");
    }

    double dx() const { return 2 * std::numbers::pi / static_cast<double>(nx); }
    double dy() const { return 2 * Ly / static_cast<double>(ny - 1); }
    double x(std::size_t i) const { return static_cast<double>(i) * dx(); }
    double y(std::size_t j) const { return -Ly + static_cast<double>(j) * dy(); }
    double& at(std::size_t i, std::size_t j) { return values[j * nx + i]; }
    double at(std::size_t i, std::size_t j) const { return values[j * nx + i]; }

    FieldGrid like() const
    {
        FieldGrid g = *this;
        std::fill(g.values.begin(), g.values.end(), 0.0);
        return g;
    }
    template <class F>
    FieldGrid map(F f) const
    {
        FieldGrid g = like();
        for (std::size_t k = 0; k < values.size(); ++k) g.values[k] = f(values[k]);
        return g;
    }
};

// Centered second differences; one-sided second-order rows at y = +-Ly.
inline FieldGrid laplacian(const FieldGrid& u)
{
    FieldGrid L = u.like();
    double dx2 = u.dx() * u.dx(), dy2 = u.dy() * u.dy();
    std::size_t nx = u.nx, ny = u.ny;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) {
            double c = u.at(i, j);
            double uxx = (u.at((i + 1) % nx, j) - 2 * c + u.at((i + nx - 1) % nx, j)) / dx2;
            double uyy;
            if (j == 0) uyy = (2 * c - 5 * u.at(i, 1) + 4 * u.at(i, 2) - u.at(i, 3)) / dy2;
            else if (j == ny - 1) uyy = (2 * c - 5 * u.at(i, ny - 2) + 4 * u.at(i, ny - 3) - u.at(i, ny - 4)) / dy2;
            else uyy = (u.at(i, j + 1) - 2 * c + u.at(i, j - 1)) / dy2;
            L.at(i, j) = uxx + uyy;
        }
    return L;
}

struct Residual {
    double max = 0, l2 = 0;
};

// Residual of lap u = rhs(u) on the interior rows.
inline Residual pde_residual(const FieldGrid& u, const std::function<double(double)>& rhs)
{
    FieldGrid L = laplacian(u);
    Residual r;
    double sum = 0;
    for (std::size_t j = 1; j + 1 < u.ny; ++j)
        for (std::size_t i = 0; i < u.nx; ++i) {
            double e = std::abs(L.at(i, j) - rhs(u.at(i, j)));
            r.max = std::max(r.max, e);
            sum += e * e;
        }
    r.l2 = std::sqrt(sum * u.dx() * u.dy());
    return r;
}

inline FieldGrid catseye_field(double a, std::size_t nx, std::size_t ny, double Ly = std::numbers::pi)
{
    if (!(a >= 1)) throw error(errc::bad_parameter, "cat's eye parameter must be at least 1");
    FieldGrid u(nx, ny, Ly);
    double b = std::sqrt(a * a - 1);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) u.at(i, j) = std::log(a * std::cosh(u.y(j)) + b * std::cos(u.x(i)));
    return u;
}

// ---------------------------------------------------------------------------
// Profiles of one variable with analytic derivatives up to third order
// ---------------------------------------------------------------------------

struct Profile1D {
    enum class Kind { poly, exp, cosh, sinh };
    Kind kind = Kind::poly;
    std::vector<double> coeffs; // poly: sum c_k s^k
    double A = 1, b = 1;        // A fn(b s)

    static Profile1D poly(std::vector<double> c) { return {Kind::poly, std::move(c), 1, 1}; }
    static Profile1D constant(double c) { return poly({c}); }
    static Profile1D exp(double A, double b) { return {Kind::exp, {}, A, b}; }
    static Profile1D cosh(double A, double b) { return {Kind::cosh, {}, A, b}; }
    static Profile1D sinh(double A, double b) { return {Kind::sinh, {}, A, b}; }

    double operator()(double s, unsigned order = 0) const
    {
        if (order > 3) throw error(errc::bad_parameter, "profiles carry derivatives up to third order");
        switch (kind) {
        case Kind::poly: {
            double acc = 0, p = 1;
            for (std::size_t k = order; k < coeffs.size(); ++k) {
                double f = 1;
                for (unsigned j = 0; j < order; ++j) f *= static_cast<double>(k - j);
                acc += coeffs[k] * f * p;
                p *= s;
            }
            return acc;
        }
        case Kind::exp: return A * std::pow(b, order) * std::exp(b * s);
        case Kind::cosh: return A * std::pow(b, order) * (order % 2 ? std::sinh(b * s) : std::cosh(b * s));
        case Kind::sinh: return A * std::pow(b, order) * (order % 2 ? std::cosh(b * s) : std::sinh(b * s));
        }
        return 0;
    }

    // True when the second derivative vanishes identically.
    bool is_affine() const
    {
        if (kind != Kind::poly) return A == 0 || b == 0;
        for (std::size_t k = 2; k < coeffs.size(); ++k)
            if (coeffs[k] != 0) return false;
        return true;
    }

    FieldGrid compose(const FieldGrid& u, unsigned order = 0) const
    {
        return u.map([&](double s) { return (*this)(s, order); });
    }
};

// Central-difference check of the analytic derivatives at the sample points.
inline bool profile_consistent(const Profile1D& p, const std::vector<double>& samples, double tol = 1e-6)
{
    for (double s : samples)
        for (unsigned k = 0; k < 3; ++k) {
            double h = 1e-4 * std::max(1.0, std::abs(s));
            double fd = (p(s + h, k) - p(s - h, k)) / (2 * h);
            double an = p(s, k + 1);
            if (std::abs(fd - an) > tol * std::max(1.0, std::abs(an))) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct ConditionResult {
    std::string name;
    std::vector<std::uint8_t> pass; // per point; excluded points hold 0
    std::size_t evaluated = 0;
    std::size_t passed = 0;
    double fraction() const { return evaluated ? static_cast<double>(passed) / static_cast<double>(evaluated) : 0.0; }
    std::string verdict() const { return evaluated && passed == evaluated ? "sufficient condition satisfied" : "not provably stable"; }
};

struct StabilityReport {
    std::vector<std::pair<std::string, FieldGrid>> fields;
    std::vector<std::uint8_t> excluded; // masked points (resonance, vanishing M')
    std::vector<ConditionResult> conditions;

    const FieldGrid& field(const std::string& name) const
    {
        for (auto& [n, f] : fields)
            if (n == name) return f;
        throw error(errc::index_out_of_range, "no field named " + name);
    }
    const ConditionResult& condition(const std::string& name) const
    {
        for (auto& c : conditions)
            if (c.name == name) return c;
        throw error(errc::index_out_of_range, "no condition named " + name);
    }
};

inline ConditionResult evaluate_condition(const std::string& name, const std::vector<std::uint8_t>& excluded,
                                          const std::function<bool(std::size_t)>& ok)
{
    ConditionResult c;
    c.name = name;
    c.pass.assign(excluded.size(), 0);
    for (std::size_t k = 0; k < excluded.size(); ++k) {
        if (excluded[k]) continue;
        ++c.evaluated;
        if (ok(k)) {
            c.pass[k] = 1;
            ++c.passed;
        }
    }
    return c;
}

// Run-length encoding as alternating run lengths, starting with a run of zeros.
inline std::vector<std::size_t> run_lengths(const std::vector<std::uint8_t>& mask)
{
    std::vector<std::size_t> runs;
    std::uint8_t cur = 0;
    std::size_t len = 0;
    for (auto m : mask) {
        std::uint8_t b = m ? 1 : 0;
        if (b != cur) {
            runs.push_back(len);
            cur = b;
            len = 0;
        }
        ++len;
    }
    runs.push_back(len);
    return runs;
}

// ---------------------------------------------------------------------------
// CRMHD energy-Casimir equilibria
// ---------------------------------------------------------------------------

struct EquilibriumProfile {
    Profile1D Phi, a1, a2, a3;
    double beta_e = 1;
};

struct CrmhdFields {
    FieldGrid psi, v, p;
    std::vector<std::uint8_t> resonant;
};

inline double resonance_tolerance(double phip, double beta_e)
{
    return 1e-12 * std::max(1.0, phip * phip / beta_e);
}

inline std::vector<std::uint8_t> resonance_mask(const EquilibriumProfile& pr, const FieldGrid& psi)
{
    std::vector<std::uint8_t> m(psi.values.size(), 0);
    for (std::size_t k = 0; k < m.size(); ++k) {
        double f = pr.Phi(psi.values[k], 1);
        m[k] = std::abs(f * f / pr.beta_e - 1) < resonance_tolerance(f, pr.beta_e);
    }
    return m;
}

inline CrmhdFields crmhd_equilibrium(const EquilibriumProfile& pr, const FieldGrid& psi)
{
    if (!(pr.beta_e > 0)) throw error(errc::bad_parameter, "beta_e must be positive");
    CrmhdFields out{psi, psi.like(), psi.like(), resonance_mask(pr, psi)};
    if (std::all_of(out.resonant.begin(), out.resonant.end(), [](std::uint8_t b) { return b != 0; }))
        throw error(errc::all_resonant, "every grid point sits on the acoustic resonance");
    for (std::size_t j = 0; j < psi.ny; ++j)
        for (std::size_t i = 0; i < psi.nx; ++i) {
            std::size_t k = j * psi.nx + i;
            if (out.resonant[k]) continue;
            double s = psi.values[k], f = pr.Phi(s, 1), x = psi.x(i);
            double den = f * f / pr.beta_e - 1;
            double a2 = pr.a2(s), a3 = pr.a3(s);
            out.v.values[k] = (a2 + (a3 - 2 * x) * f) / den;
            out.p.values[k] = (a2 * f + pr.beta_e * (a3 - 2 * x)) / den;
        }
    return out;
}

// Principal minors of the second-variation matrix
//   [[1, -Phi'/b, A], [-Phi'/b, 1/b, B], [A, B, Q]].
inline StabilityReport crmhd_minors(const CrmhdFields& eq, const EquilibriumProfile& pr)
{
    const FieldGrid& psi = eq.psi;
    double be = pr.beta_e;
    FieldGrid P1 = psi.like(), P2 = psi.like(), P3 = psi.like();
    FieldGrid omega = laplacian(pr.Phi.compose(psi, 0));
    FieldGrid lapPhip = laplacian(pr.Phi.compose(psi, 1));
    for (std::size_t k = 0; k < psi.values.size(); ++k) {
        if (eq.resonant[k]) continue;
        double s = psi.values[k], v = eq.v.values[k], p = eq.p.values[k];
        double f1 = pr.Phi(s, 1), f2 = pr.Phi(s, 2), f3 = pr.Phi(s, 3);
        double A = pr.a2(s, 1) - p * f2 / be;
        double B = pr.a3(s, 1) - v * f2 / be;
        double Q = pr.a1(s, 2) + v * pr.a2(s, 2) + p * pr.a3(s, 2) + omega.values[k] * f2 - p * v * f3 / be +
                   f1 * lapPhip.values[k];
        double m12 = -f1 / be;
        P1.values[k] = 1;
        P2.values[k] = (1 / be) * (1 - f1 * f1 / be);
        P3.values[k] = 1 * (Q / be - B * B) - m12 * (m12 * Q - B * A) + A * (m12 * B - A / be);
    }
    StabilityReport r;
    r.excluded = eq.resonant;
    auto phip = [&](std::size_t k) { return pr.Phi(psi.values[k], 1); };
    r.conditions.push_back(evaluate_condition("phi_prime_bound", r.excluded, [&](std::size_t k) { return std::abs(phip(k)) <= 1; }));
    r.conditions.push_back(evaluate_condition("phi_prime_beta_bound", r.excluded, [&](std::size_t k) {
        double f = phip(k);
        return f * f <= std::min(1.0, be);
    }));
    r.conditions.push_back(evaluate_condition("p3_nonnegative", r.excluded, [&](std::size_t k) { return P3.values[k] >= 0; }));
    r.fields = {{"P1", P1}, {"P2", P2}, {"P3", P3}, {"v", eq.v}, {"p", eq.p}};

    // Alfvenic profile: Phi' = 1/c constant. When Phi' a2' + be a3' = 0 the current
    // is a function of psi alone and P3 = P2 (1 - 1/c^2) Je'.
    if (pr.Phi.is_affine()) {
        double f1 = pr.Phi(0, 1), inv_c2 = f1 * f1;
        bool x_free = std::all_of(psi.values.begin(), psi.values.end(), [&](double s) {
            double a = f1 * pr.a2(s, 1), b = be * pr.a3(s, 1);
            return std::abs(a + b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
        });
        if (x_free && inv_c2 != 1) {
            FieldGrid Jp = psi.like();
            for (std::size_t k = 0; k < psi.values.size(); ++k) {
                double s = psi.values[k];
                double a2p = pr.a2(s, 1);
                Jp.values[k] = (pr.a1(s, 2) - a2p * a2p - pr.a2(s) * pr.a2(s, 2)) / (1 - inv_c2);
            }
            r.conditions.push_back(
                evaluate_condition("alfvenic_current_slope", r.excluded, [&](std::size_t k) { return Jp.values[k] >= 0; }));
            r.fields.push_back({"Je_prime", Jp});
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Reduced MHD: dynamical accessibility, magnetic islands with flow
// ---------------------------------------------------------------------------

struct RmhdProfile {
    Profile1D Psi, M, Upsilon;
};

// Psi' = k sinh(nu u), M' = k cosh(nu u), Upsilon' = k^2 exp(-2u).
inline RmhdProfile islands_profile(double k, double nu)
{
    if (!(k > 0) || !std::isfinite(nu)) throw error(errc::bad_parameter, "islands need k > 0 and finite nu");
    RmhdProfile p;
    if (nu == 0) {
        p.Psi = Profile1D::constant(0);
        p.M = Profile1D::poly({0, k});
    } else {
        p.Psi = Profile1D::cosh(k / nu, nu);
        p.M = Profile1D::sinh(k / nu, nu);
    }
    p.Upsilon = Profile1D::exp(-k * k / 2, -2);
    return p;
}

struct IslandFields {
    FieldGrid u, Mp, Psip, DPsi;
};

inline IslandFields islands_with_flow(double k, double nu, double a, std::size_t nx, std::size_t ny,
                                      double Ly = std::numbers::pi)
{
    RmhdProfile pr = islands_profile(k, nu);
    IslandFields f;
    f.u = catseye_field(a, nx, ny, Ly);
    f.Mp = pr.M.compose(f.u, 1);
    f.Psip = pr.Psi.compose(f.u, 1);
    f.DPsi = f.u.map([&](double s) { return std::tanh(nu * s); });
    return f;
}

// |D Psi| <= 1 and D Psi lap(D Psi) + lap(Psi) D^2 Psi + D^2 Upsilon >= 0 with D = (1/M') d/du.
inline StabilityReport rmhd_da_conditions(const RmhdProfile& pr, const FieldGrid& u)
{
    auto D = [&](const Profile1D& f, double s) { return f(s, 1) / pr.M(s, 1); };
    auto D2 = [&](const Profile1D& f, double s) {
        double m1 = pr.M(s, 1);
        return (f(s, 2) * m1 - f(s, 1) * pr.M(s, 2)) / (m1 * m1 * m1);
    };
    StabilityReport r;
    r.excluded.assign(u.values.size(), 0);
    FieldGrid Dpsi = u.like();
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        double s = u.values[k];
        if (pr.M(s, 1) == 0) {
            r.excluded[k] = 1;
            continue;
        }
        Dpsi.values[k] = D(pr.Psi, s);
    }
    FieldGrid lapD = laplacian(Dpsi);
    FieldGrid lapPsi = laplacian(pr.Psi.compose(u, 0));
    FieldGrid second = u.like();
    for (std::size_t k = 0; k < u.values.size(); ++k) {
        if (r.excluded[k]) continue;
        double s = u.values[k];
        second.values[k] = Dpsi.values[k] * lapD.values[k] + lapPsi.values[k] * D2(pr.Psi, s) + D2(pr.Upsilon, s);
    }
    r.conditions.push_back(
        evaluate_condition("dpsi_bound", r.excluded, [&](std::size_t k) { return std::abs(Dpsi.values[k]) <= 1; }));
    r.conditions.push_back(
        evaluate_condition("second_condition", r.excluded, [&](std::size_t k) { return second.values[k] >= 0; }));
    r.fields = {{"DPsi", Dpsi}, {"second", second}};
    return r;
}

// Two-dimensional Euler: Psi'(u) V'(u) >= 0 pointwise.
inline StabilityReport euler_rayleigh(const Profile1D& psi_prime, const Profile1D& v_prime, const FieldGrid& u)
{
    StabilityReport r;
    r.excluded.assign(u.values.size(), 0);
    FieldGrid prod = u.map([&](double s) { return psi_prime(s) * v_prime(s); });
    r.conditions.push_back(
        evaluate_condition("euler_sign", r.excluded, [&](std::size_t k) { return prod.values[k] >= 0; }));
    r.fields = {{"product", prod}};
    return r;
}

// ---------------------------------------------------------------------------
// Field output
// ---------------------------------------------------------------------------

inline void write_field_csv(std::ostream& os, const FieldGrid& f)
{
    char buf[96];
    os << "x,y,value\n";
    for (std::size_t j = 0; j < f.ny; ++j)
        for (std::size_t i = 0; i < f.nx; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", f.x(i), f.y(j), f.at(i, j));
            os << buf;
        }
}

inline void write_field_binary(std::ostream& os, const FieldGrid& f)
{
    os.write(reinterpret_cast<const char*>(f.values.data()), static_cast<std::streamsize>(f.values.size() * sizeof(double)));
}

} // namespace lpx
