#pragma once

// Lie-Poisson time integration for extensions of a finite-dimensional algebra.
// Everything here runs in binary64.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "casimir.hpp"
#include "extension.hpp"

namespace lpx {

// Components v^mu_i stored at v[mu * adim + i].
struct SimState {
    std::size_t components = 0;
    std::size_t adim = 0;
    std::vector<double> v;
    double t = 0.0;

    SimState() = default;
    SimState(std::size_t comps, std::size_t ad) : components(comps), adim(ad), v(comps * ad, 0.0) {}
    double& at(std::size_t mu, std::size_t i) { return v[mu * adim + i]; }
    double at(std::size_t mu, std::size_t i) const { return v[mu * adim + i]; }
};

struct RigidBody {
    std::array<double, 3> I{1.0, 1.0, 1.0};
};
struct HeavyTop {
    std::array<double, 3> I{1.0, 1.0, 1.0};
    double mgl = 1.0;
    std::array<double, 3> chi{0.0, 0.0, 1.0};
};
// H = 1/2 x^T Q x over the flattened state.
struct QuadraticHamiltonian {
    std::vector<double> Q;
};

class HamiltonianSpec {
public:
    using variant_t = std::variant<RigidBody, HeavyTop, QuadraticHamiltonian>;
    HamiltonianSpec(variant_t v) : h_(std::move(v)) {}

    const variant_t& variant() const { return h_; }

    double value(const SimState& s) const
    {
        return std::visit([&](const auto& h) { return eval(h, s); }, h_);
    }

    std::vector<double> gradient(const SimState& s) const
    {
        std::vector<double> g(s.v.size(), 0.0);
        std::visit([&](const auto& h) { grad(h, s, g); }, h_);
        return g;
    }

private:
    static void need(const SimState& s, std::size_t comps)
    {
        if (s.adim != 3 || s.components < comps) throw error(errc::dimension_mismatch, "state does not fit the Hamiltonian");
    }
    static double eval(const RigidBody& h, const SimState& s)
    {
        need(s, 1);
        double e = 0;
        for (std::size_t i = 0; i < 3; ++i) e += 0.5 * s.at(0, i) * s.at(0, i) / h.I[i];
        return e;
    }
    static void grad(const RigidBody& h, const SimState& s, std::vector<double>& g)
    {
        need(s, 1);
        for (std::size_t i = 0; i < 3; ++i) g[i] = s.at(0, i) / h.I[i];
    }
    static double eval(const HeavyTop& h, const SimState& s)
    {
        need(s, 2);
        double e = eval(RigidBody{h.I}, s);
        for (std::size_t i = 0; i < 3; ++i) e += h.mgl * h.chi[i] * s.at(1, i);
        return e;
    }
    static void grad(const HeavyTop& h, const SimState& s, std::vector<double>& g)
    {
        grad(RigidBody{h.I}, s, g);
        for (std::size_t i = 0; i < 3; ++i) g[3 + i] = h.mgl * h.chi[i];
    }
    static double eval(const QuadraticHamiltonian& h, const SimState& s)
    {
        std::size_t N = s.v.size();
        if (h.Q.size() != N * N) throw error(errc::dimension_mismatch, "quadratic form has the wrong size");
        double e = 0;
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) e += 0.5 * s.v[a] * h.Q[a * N + b] * s.v[b];
        return e;
    }
    static void grad(const QuadraticHamiltonian& h, const SimState& s, std::vector<double>& g)
    {
        std::size_t N = s.v.size();
        if (h.Q.size() != N * N) throw error(errc::dimension_mismatch, "quadratic form has the wrong size");
        for (std::size_t a = 0; a < N; ++a) {
            double acc = 0;
            for (std::size_t b = 0; b < N; ++b) acc += 0.5 * (h.Q[a * N + b] + h.Q[b * N + a]) * s.v[b];
            g[a] = acc;
        }
    }

    variant_t h_;
};

// Real tensor and structure constants in binary64, prepared once per run.
struct CoadjointSystem {
    std::size_t d = 0, adim = 0;
    std::vector<double> W; // (l*d + m)*d + n
    std::vector<double> c; // (i*adim + j)*adim + k

    CoadjointSystem(const ExtensionTensor& T, const LieAlgebraSpec& alg) : d(T.dim()), adim(alg.dim)
    {
        W.resize(d * d * d);
        for (std::size_t l = 0; l < d; ++l)
            for (std::size_t m = 0; m < d; ++m)
                for (std::size_t n = 0; n < d; ++n) {
                    const Scalar& s = T(l, m, n);
                    if (!s.is_real()) throw error(errc::bad_parameter, "time integration needs a real tensor");
                    W[(l * d + m) * d + n] = s.real_double();
                }
        c.resize(adim * adim * adim);
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!alg.c[k].is_real()) throw error(errc::bad_parameter, "structure constants must be real");
            c[k] = alg.c[k].real_double();
        }
    }
};

// (dv/dt)^nu_i = W_l^{mn} c_ij^k (dH/dv^m)_j v^l_k
inline std::vector<double> coadjoint_rhs(const CoadjointSystem& sys, const HamiltonianSpec& H, const SimState& s)
{
    std::size_t d = sys.d, a = sys.adim;
    if (s.components != d || s.adim != a) throw error(errc::dimension_mismatch, "state does not match the tensor and algebra");
    std::vector<double> g = H.gradient(s);
    std::vector<double> out(d * a, 0.0);
    for (std::size_t l = 0; l < d; ++l)
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n) {
                double w = sys.W[(l * d + m) * d + n];
                if (w == 0.0) continue;
                for (std::size_t i = 0; i < a; ++i) {
                    double acc = 0;
                    for (std::size_t j = 0; j < a; ++j)
                        for (std::size_t k = 0; k < a; ++k) {
                            double cc = sys.c[(i * a + j) * a + k];
                            if (cc != 0.0) acc += cc * g[m * a + j] * s.v[l * a + k];
                        }
                    out[n * a + i] += w * acc;
                }
            }
    return out;
}

inline std::vector<double> coadjoint_rhs(const ExtensionTensor& W, const LieAlgebraSpec& alg, const HamiltonianSpec& H,
                                         const SimState& s)
{
    return coadjoint_rhs(CoadjointSystem(W, alg), H, s);
}

using Monitor = std::function<double(const SimState&)>;

// C = 1/2 g^{ij} C_{mn} v^m_i v^n_j
inline Monitor quadratic_casimir_monitor(const Matrix& C, const LieAlgebraSpec& alg)
{
    Matrix ginv = inverse(alg.killing());
    std::size_t a = alg.dim, d = C.rows();
    std::vector<double> gi(a * a), cm(d * d);
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < a; ++j) gi[i * a + j] = ginv(i, j).real_double();
    for (std::size_t m = 0; m < d; ++m)
        for (std::size_t n = 0; n < d; ++n) cm[m * d + n] = C(m, n).real_double();
    return [gi, cm, a, d](const SimState& s) {
        double acc = 0;
        for (std::size_t m = 0; m < d; ++m)
            for (std::size_t n = 0; n < d; ++n) {
                if (cm[m * d + n] == 0.0) continue;
                for (std::size_t i = 0; i < a; ++i)
                    for (std::size_t j = 0; j < a; ++j) acc += gi[i * a + j] * cm[m * d + n] * s.at(m, i) * s.at(n, j);
            }
        return 0.5 * acc;
    };
}

struct Trajectory {
    std::vector<SimState> states;              // recorded states
    std::vector<std::vector<double>> monitors; // per record: H then each monitor
    std::size_t record_every = 1;
};

inline Trajectory rk4_run(const ExtensionTensor& W, const LieAlgebraSpec& alg, const HamiltonianSpec& H, SimState s,
                          double dt, std::size_t steps, const std::vector<Monitor>& monitors = {},
                          std::size_t record_every = 1)
{
    if (!(dt > 0)) throw error(errc::bad_parameter, "time step must be positive");
    if (record_every == 0) throw error(errc::bad_parameter, "record interval must be positive");
    CoadjointSystem sys(W, alg);
    Trajectory tr;
    tr.record_every = record_every;
    auto record = [&](const SimState& st) {
        std::vector<double> row{H.value(st)};
        for (auto& m : monitors) row.push_back(m(st));
        tr.states.push_back(st);
        tr.monitors.push_back(std::move(row));
    };
    auto axpy = [](const SimState& base, const std::vector<double>& k, double h) {
        SimState r = base;
        for (std::size_t q = 0; q < r.v.size(); ++q) r.v[q] += h * k[q];
        return r;
    };
    record(s);
    for (std::size_t step = 1; step <= steps; ++step) {
        auto k1 = coadjoint_rhs(sys, H, s);
        auto k2 = coadjoint_rhs(sys, H, axpy(s, k1, dt / 2));
        auto k3 = coadjoint_rhs(sys, H, axpy(s, k2, dt / 2));
        auto k4 = coadjoint_rhs(sys, H, axpy(s, k3, dt));
        for (std::size_t q = 0; q < s.v.size(); ++q) {
            s.v[q] += dt / 6 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
            if (!std::isfinite(s.v[q])) throw error(errc::non_finite, "state blew up at step " + std::to_string(step));
        }
        s.t += dt;
        if (step % record_every == 0 || step == steps) record(s);
    }
    return tr;
}

// Largest relative deviation of each monitor column from its initial value.
inline std::vector<double> relative_drift(const Trajectory& tr)
{
    if (tr.monitors.empty()) return {};
    std::vector<double> out(tr.monitors[0].size(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        double ref = tr.monitors[0][k];
        double scale = std::abs(ref) > 0 ? std::abs(ref) : 1.0;
        for (auto& row : tr.monitors) out[k] = std::max(out[k], std::abs(row[k] - ref) / scale);
    }
    return out;
}

inline std::string format17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Header "t,v0_1,...,H,C1,..."; component labels follow the tensor convention.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr, bool semidirect)
{
    if (tr.states.empty()) return;
    const SimState& s0 = tr.states[0];
    os << "t";
    for (std::size_t mu = 0; mu < s0.components; ++mu)
        for (std::size_t i = 0; i < s0.adim; ++i) os << ",v" << (semidirect ? mu : mu + 1) << "_" << i + 1;
    os << ",H";
    for (std::size_t k = 1; k < tr.monitors[0].size(); ++k) os << ",C" << k;
    os << "\n";
    for (std::size_t r = 0; r < tr.states.size(); ++r) {
        os << format17(tr.states[r].t);
        for (double x : tr.states[r].v) os << "," << format17(x);
        for (double x : tr.monitors[r]) os << "," << format17(x);
        os << "\n";
    }
}

} // namespace lpx
