#pragma once

// JSON encodings of tensors, reports, Casimir families and fields.

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include <json.hpp>

#include "casimir.hpp"
#include "extension.hpp"
#include "normalize.hpp"
#include "stability.hpp"

namespace lpx {

using json = nlohmann::ordered_json;

inline json to_json(const Matrix& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).str());
        rows.push_back(r);
    }
    return rows;
}

inline Scalar scalar_from_json(const json& j)
{
    if (j.is_string()) return Scalar::parse(j.get<std::string>());
    if (j.is_number_integer()) return Scalar(j.get<long>());
    throw error(errc::parse_error, "scalar must be a string or an integer");
}

inline Matrix matrix_from_json(const json& j)
{
    if (!j.is_array()) throw error(errc::parse_error, "matrix must be an array of rows");
    std::size_t r = j.size(), c = r ? j[0].size() : 0;
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i) {
        if (!j[i].is_array() || j[i].size() != c) throw error(errc::parse_error, "ragged matrix");
        for (std::size_t k = 0; k < c; ++k) m(i, k) = scalar_from_json(j[i][k]);
    }
    return m;
}

// {"n": order, "semidirect": bool, "W": [[[...]]]} with W[l][m][n]
inline json to_json(const ExtensionTensor& W)
{
    json o;
    o["n"] = W.order();
    o["semidirect"] = W.semidirect();
    json a = json::array();
    for (std::size_t l = 0; l < W.dim(); ++l) {
        json b = json::array();
        for (std::size_t m = 0; m < W.dim(); ++m) {
            json c = json::array();
            for (std::size_t n = 0; n < W.dim(); ++n) c.push_back(W(l, m, n).str());
            b.push_back(c);
        }
        a.push_back(b);
    }
    o["W"] = a;
    return o;
}

inline ExtensionTensor tensor_from_json(const json& j)
{
    try {
        if (!j.is_object() || !j.contains("n") || !j.contains("W")) throw error(errc::parse_error, "tensor needs \"n\" and \"W\"");
        if (!j["n"].is_number_integer() || j["n"].get<long>() < 0) throw error(errc::parse_error, "\"n\" must be a non-negative integer");
        std::size_t n = j["n"].get<std::size_t>();
        bool semi = j.value("semidirect", false);
        if (n == 0 && !semi) throw error(errc::parse_error, "solvable tensors need n >= 1");
        ExtensionTensor W(n, semi);
        std::size_t d = W.dim();
        const json& a = j["W"];
        if (!a.is_array() || a.size() != d) throw error(errc::parse_error, "\"W\" has the wrong outer size");
        for (std::size_t l = 0; l < d; ++l) {
            if (!a[l].is_array() || a[l].size() != d) throw error(errc::parse_error, "\"W\" has the wrong middle size");
            for (std::size_t m = 0; m < d; ++m) {
                if (!a[l][m].is_array() || a[l][m].size() != d) throw error(errc::parse_error, "\"W\" has the wrong inner size");
                for (std::size_t k = 0; k < d; ++k) W(l, m, k) = scalar_from_json(a[l][m][k]);
            }
        }
        return W;
    } catch (const json::exception& e) {
        throw error(errc::parse_error, e.what());
    }
}

inline std::string read_text(const std::string& path)
{
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream f(path, std::ios::binary);
    if (!f) throw error(errc::parse_error, "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline json parse_json_text(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw error(errc::parse_error, e.what());
    }
}

inline ExtensionTensor load_tensor(const std::string& path) { return tensor_from_json(parse_json_text(read_text(path))); }

inline json to_json(const ValidationReport& r)
{
    json o;
    o["pass"] = r.all_pass();
    json ax = json::array();
    for (auto& a : r.axioms) {
        json e;
        e["name"] = a.name;
        e["pass"] = a.pass;
        e["first_violation"] = a.pass ? json(nullptr) : json(a.first_violation);
        ax.push_back(e);
    }
    o["axioms"] = ax;
    return o;
}

inline json to_json(const Fingerprint& f)
{
    json o;
    o["n"] = f.n;
    o["eps"] = f.eps;
    o["slice_ranks"] = f.slice_ranks;
    o["lcs_dims"] = f.lcs_dims;
    o["wn_rank"] = f.wn_rank;
    o["ann_dim"] = f.ann_dim;
    o["der_dim"] = f.der_dim;
    o["coext_vanishes"] = f.coext_vanishes;
    return o;
}

inline json to_json(const Classification& c)
{
    json o;
    json blocks = json::array();
    for (auto& b : c.blocks) {
        json e;
        e["case_id"] = b.case_id;
        e["semidirect"] = b.semidirect;
        e["offset"] = b.offset;
        e["size"] = b.size;
        e["fingerprint"] = to_json(b.fp);
        e["witness"] = b.witness ? to_json(*b.witness) : json(nullptr);
        blocks.push_back(e);
    }
    o["blocks"] = blocks;
    o["split_basis"] = to_json(c.split.M);
    return o;
}

inline json to_json(const CasimirExpression& c)
{
    json o;
    o["family"] = c.family;
    json args = json::array();
    for (auto& u : c.args) args.push_back(render_linear_form(u, c.semidirect));
    o["function_args"] = args;
    json terms = json::array();
    for (auto& t : c.terms()) {
        json e;
        e["coeff"] = t.coeff.str();
        json mono = json::object();
        for (auto& [k, p] : t.monomial) mono[std::to_string(c.label(k))] = p;
        e["monomial"] = mono;
        e["deriv"] = t.deriv;
        terms.push_back(e);
    }
    o["terms"] = terms;
    return o;
}

inline json to_json(const ConditionResult& c)
{
    json o;
    o["name"] = c.name;
    o["evaluated"] = c.evaluated;
    o["passed"] = c.passed;
    o["pass_fraction"] = c.fraction();
    o["verdict"] = c.verdict();
    o["mask_rle"] = run_lengths(c.pass);
    return o;
}

inline json to_json(const StabilityReport& r)
{
    json o;
    std::size_t excl = 0;
    for (auto e : r.excluded) excl += e ? 1 : 0;
    o["points"] = r.excluded.size();
    o["excluded"] = excl;
    o["excluded_rle"] = run_lengths(r.excluded);
    json cs = json::array();
    for (auto& c : r.conditions) cs.push_back(to_json(c));
    o["conditions"] = cs;
    return o;
}

inline json field_sidecar(const FieldGrid& f)
{
    json o;
    o["nx"] = f.nx;
    o["ny"] = f.ny;
    o["x0"] = f.x(0);
    o["dx"] = f.dx();
    o["y0"] = f.y(0);
    o["dy"] = f.dy();
    return o;
}

} // namespace lpx
