// Command-line front end. Data goes to stdout (or --out), diagnostics to stderr.
//
// Exit codes:
//   0   success
//   1   validate: at least one axiom fails
//   2   unreadable input, malformed JSON or tensor, bad command line
//   3+  library errors, 2 + the position of the code in lpx::errc
//   40  any other failure

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lpx/lpx.hpp"

namespace {

using namespace lpx;

constexpr int exit_other = 40;

int exit_code(errc c) { return 2 + static_cast<int>(c); }

struct Common {
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
};

class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw error(errc::parse_error, "cannot write " + path);
        }
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::vector<double> parse_list(const std::string& s, std::size_t expect, const char* what)
{
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw error(errc::bad_parameter, std::string("cannot read ") + what + " entry '" + item + "'");
        }
    }
    if (expect && v.size() != expect)
        throw error(errc::bad_parameter, std::string(what) + " needs " + std::to_string(expect) + " comma-separated values");
    return v;
}

std::array<double, 3> triple(const std::string& s, const char* what)
{
    auto v = parse_list(s, 3, what);
    return {v[0], v[1], v[2]};
}

std::string matrix_text(const Matrix& m)
{
    std::string s;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        s += "  [";
        for (std::size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + m(i, j).pretty();
        s += "]\n";
    }
    return s;
}

// ---------------------------------------------------------------------------

int run_validate(const Common& c, const std::string& path)
{
    ExtensionTensor W = load_tensor(path);
    ValidationReport rep = validate(W);
    Sink out(c.out);
    if (c.format == "text") {
        for (auto& a : rep.axioms) {
            out.os() << a.name << ": " << (a.pass ? "pass" : "FAIL");
            if (!a.pass) {
                out.os() << " at";
                for (auto k : a.first_violation) out.os() << " " << k;
            }
            out.os() << "\n";
        }
    } else {
        out.os() << to_json(rep).dump(2) << "\n";
    }
    if (rep.all_pass()) return 0;
    for (auto& a : rep.axioms)
        if (!a.pass) std::cerr << "lpx: axiom '" << a.name << "' fails\n";
    return 1;
}

int run_classify(const Common& c, const std::string& path)
{
    Classification cl = classify(load_tensor(path), c.seed);
    Sink out(c.out);
    if (c.format == "text") {
        for (auto& b : cl.blocks) {
            out.os() << "block at " << b.offset << " size " << b.size << ": " << b.case_id
                     << (b.semidirect ? " (semidirect)" : "") << "\n";
            if (b.witness) out.os() << " witness:\n" << matrix_text(*b.witness);
            else out.os() << " witness: unresolved\n";
        }
    } else {
        out.os() << to_json(cl).dump(2) << "\n";
    }
    return 0;
}

int run_casimirs(const Common& c, const std::string& path)
{
    ExtensionTensor W = load_tensor(path);
    auto fams = casimir_families(W, c.seed);
    Sink out(c.out);
    if (c.format == "text") {
        for (std::size_t k = 0; k < fams.size(); ++k) {
            std::string fn = (fams[k].args.size() > 1 ? "h" : "f") + std::to_string(k + 1);
            out.os() << render(fams[k], fn) << "\n";
        }
    } else {
        json a = json::array();
        for (auto& f : fams) a.push_back(to_json(f));
        out.os() << a.dump(2) << "\n";
    }
    return 0;
}

int run_leibniz(const Common& c, std::size_t order, bool semidirect)
{
    ExtensionTensor W = leibniz(order, semidirect);
    Sink out(c.out);
    out.os() << to_json(W).dump(c.format == "text" ? -1 : 2) << "\n";
    return 0;
}

struct SimOptions {
    std::string system = "rigid-body";
    std::string inertia = "1,2,3";
    double mgl = 1.0;
    std::string chi = "0,0,1";
    std::string state;
    std::string tensor;
    std::string q;
    double dt = 1e-3;
    std::size_t steps = 10000;
    std::size_t every = 1;
};

int run_simulate(const Common& c, const SimOptions& o)
{
    LieAlgebraSpec alg = LieAlgebraSpec::so3();
    ExtensionTensor W;
    std::optional<HamiltonianSpec> H;
    if (o.system == "rigid-body") {
        W = ExtensionTensor(0, true);
        W(0, 0, 0) = Scalar(1);
        H.emplace(RigidBody{triple(o.inertia, "--I")});
    } else if (o.system == "heavy-top") {
        W = rmhd();
        H.emplace(HeavyTop{triple(o.inertia, "--I"), o.mgl, triple(o.chi, "--chi")});
    } else if (o.system == "tensor") {
        if (o.tensor.empty()) throw error(errc::bad_parameter, "--system tensor needs --tensor");
        W = load_tensor(o.tensor);
        std::size_t N = W.dim() * alg.dim;
        auto diag = o.q.empty() ? std::vector<double>(N, 1.0) : parse_list(o.q, N, "--q");
        std::vector<double> Q(N * N, 0.0);
        for (std::size_t k = 0; k < N; ++k) Q[k * N + k] = diag[k];
        H.emplace(QuadraticHamiltonian{Q});
    } else {
        throw error(errc::bad_parameter, "unknown system " + o.system);
    }
    SimState s(W.dim(), alg.dim);
    if (o.state.empty()) {
        // unit-norm default: each component along (1,1,1)/sqrt(3), rotated by index
        for (std::size_t mu = 0; mu < W.dim(); ++mu)
            for (std::size_t i = 0; i < 3; ++i) s.at(mu, i) = (i == mu % 3 ? 2.0 : 1.0) / std::sqrt(6.0);
    } else {
        s.v = parse_list(o.state, s.v.size(), "--state");
    }
    std::vector<Monitor> mons;
    for (auto& C : quadratic_casimirs_findim(W, alg)) mons.push_back(quadratic_casimir_monitor(C, alg));
    Trajectory tr = rk4_run(W, alg, *H, s, o.dt, o.steps, mons, o.every);
    Sink out(c.out);
    write_trajectory_csv(out.os(), tr, W.semidirect());
    auto drift = relative_drift(tr);
    std::cerr << "relative drift: H " << drift[0];
    for (std::size_t k = 1; k < drift.size(); ++k) std::cerr << ", C" << k << " " << drift[k];
    std::cerr << "\n";
    return 0;
}

struct StabOptions {
    std::string problem = "catseye";
    double a = 1.5;
    std::size_t nx = 64, ny = 64;
    double Ly = std::numbers::pi;
    double beta_e = 1.0;
    std::string phi = "0,0";
    std::string a1 = "0", a2 = "0", a3 = "0";
    double k = 1.0, nu = 0.5;
    std::string field;
    std::string field_out;
    bool binary = false;
};

Profile1D poly_arg(const std::string& s, const char* what) { return Profile1D::poly(parse_list(s, 0, what)); }

int run_stability(const Common& c, const StabOptions& o)
{
    StabilityReport rep;
    json extra = json::object();
    if (o.problem == "catseye") {
        FieldGrid u = catseye_field(o.a, o.nx, o.ny, o.Ly);
        auto rhs = [](double s) { return std::exp(-2 * s); };
        Residual r = pde_residual(u, rhs);
        extra["max_residual"] = r.max;
        extra["l2_residual"] = r.l2;
        FieldGrid res = laplacian(u);
        for (std::size_t k = 0; k < res.values.size(); ++k) res.values[k] -= rhs(u.values[k]);
        rep.fields = {{"u", u}, {"residual", res}};
        rep.excluded.assign(u.values.size(), 0);
    } else if (o.problem == "crmhd") {
        FieldGrid psi = catseye_field(o.a, o.nx, o.ny, o.Ly);
        EquilibriumProfile pr{poly_arg(o.phi, "--phi"), poly_arg(o.a1, "--a1"), poly_arg(o.a2, "--a2"),
                              poly_arg(o.a3, "--a3"), o.beta_e};
        rep = crmhd_minors(crmhd_equilibrium(pr, psi), pr);
    } else if (o.problem == "islands") {
        IslandFields f = islands_with_flow(o.k, o.nu, o.a, o.nx, o.ny, o.Ly);
        rep = rmhd_da_conditions(islands_profile(o.k, o.nu), f.u);
        rep.fields.push_back({"u", f.u});
        double m = 0;
        for (double x : f.DPsi.values) m = std::max(m, std::abs(x));
        extra["max_abs_dpsi"] = m;
    } else if (o.problem == "euler") {
        FieldGrid u = catseye_field(o.a, o.nx, o.ny, o.Ly);
        rep = euler_rayleigh(poly_arg(o.a1, "--a1"), poly_arg(o.a2, "--a2"), u);
    } else {
        throw error(errc::bad_parameter, "unknown problem " + o.problem);
    }
    if (!o.field.empty()) {
        const FieldGrid& f = rep.field(o.field);
        if (o.field_out.empty()) throw error(errc::bad_parameter, "--field needs --field-out");
        std::ofstream fo(o.field_out, std::ios::binary);
        if (!fo) throw error(errc::parse_error, "cannot write " + o.field_out);
        if (o.binary) {
            write_field_binary(fo, f);
            std::ofstream side(o.field_out + ".json");
            side << field_sidecar(f).dump(2) << "\n";
        } else {
            write_field_csv(fo, f);
        }
    }
    Sink out(c.out);
    if (c.format == "text") {
        for (auto& [k, v] : extra.items()) out.os() << k << ": " << v.dump() << "\n";
        for (auto& cond : rep.conditions)
            out.os() << cond.name << ": " << cond.passed << "/" << cond.evaluated << " points, " << cond.verdict() << "\n";
    } else {
        json j = to_json(rep);
        j["problem"] = o.problem;
        for (auto& [k, v] : extra.items()) j[k] = v;
        out.os() << j.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lie-Poisson extension toolkit"};
    app.set_config("--config");
    app.require_subcommand(1);
    app.fallthrough();
    Common common;
    app.add_option("--seed", common.seed, "seed for randomized steps")->capture_default_str();
    app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    app.add_option("--out", common.out, "output file (default stdout)");

    std::string path;
    auto* v = app.add_subcommand("validate", "check the extension axioms");
    v->add_option("tensor", path, "tensor JSON, - for stdin")->required();
    auto* cl = app.add_subcommand("classify", "split into blocks and identify each");
    cl->add_option("tensor", path, "tensor JSON, - for stdin")->required();
    auto* ca = app.add_subcommand("casimirs", "Casimir invariant families");
    ca->add_option("tensor", path, "tensor JSON, - for stdin")->required();

    std::size_t order = 2;
    bool semidirect = false;
    auto* lb = app.add_subcommand("leibniz", "emit the Leibniz extension");
    lb->add_option("--order", order, "order n")->required()->check(CLI::PositiveNumber);
    lb->add_flag("--semidirect", semidirect, "append the semisimple slot");

    SimOptions so;
    auto* sim = app.add_subcommand("simulate", "RK4 integration with conservation monitors");
    sim->add_option("--system", so.system)->check(CLI::IsMember({"rigid-body", "heavy-top", "tensor"}))->capture_default_str();
    sim->add_option("--I", so.inertia, "principal moments")->capture_default_str();
    sim->add_option("--mgl", so.mgl, "gravity coupling")->capture_default_str();
    sim->add_option("--chi", so.chi, "body-frame center of mass direction")->capture_default_str();
    sim->add_option("--state", so.state, "initial state, comma separated");
    sim->add_option("--tensor", so.tensor, "tensor JSON for --system tensor");
    sim->add_option("--q", so.q, "diagonal of the quadratic Hamiltonian");
    sim->add_option("--dt", so.dt)->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--steps", so.steps)->capture_default_str();
    sim->add_option("--record-every", so.every)->check(CLI::PositiveNumber)->capture_default_str();

    StabOptions st;
    auto* sb = app.add_subcommand("stability", "grid evaluation of equilibria and stability conditions");
    sb->add_option("--problem", st.problem)->check(CLI::IsMember({"catseye", "crmhd", "islands", "euler"}))->capture_default_str();
    sb->add_option("--a", st.a, "cat's eye parameter")->capture_default_str();
    sb->add_option("--nx", st.nx)->capture_default_str();
    sb->add_option("--ny", st.ny)->capture_default_str();
    sb->add_option("--Ly", st.Ly)->check(CLI::PositiveNumber);
    sb->add_option("--beta-e", st.beta_e)->check(CLI::PositiveNumber)->capture_default_str();
    sb->add_option("--phi", st.phi, "polynomial coefficients of Phi")->capture_default_str();
    sb->add_option("--a1", st.a1, "polynomial coefficients (euler: Psi')")->capture_default_str();
    sb->add_option("--a2", st.a2, "polynomial coefficients (euler: V')")->capture_default_str();
    sb->add_option("--a3", st.a3, "polynomial coefficients")->capture_default_str();
    sb->add_option("--k", st.k)->check(CLI::PositiveNumber)->capture_default_str();
    sb->add_option("--nu", st.nu)->capture_default_str();
    sb->add_option("--field", st.field, "field to write");
    sb->add_option("--field-out", st.field_out, "path for the field");
    sb->add_flag("--binary", st.binary, "raw binary with a JSON sidecar instead of CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*v) return run_validate(common, path);
        if (*cl) return run_classify(common, path);
        if (*ca) return run_casimirs(common, path);
        if (*lb) return run_leibniz(common, order, semidirect);
        if (*sim) return run_simulate(common, so);
        if (*sb) return run_stability(common, st);
    } catch (const lpx::error& e) {
        std::cerr << "lpx: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "lpx: " << e.what() << "\n";
        return exit_other;
    }
    return exit_other;
}
