#pragma once

// Sparse multivariate polynomials with exact coefficients.

#include <map>
#include <vector>

#include "exactfield.hpp"

namespace lpx {

template <class T>
class basic_polynomial {
public:
    using exponents = std::vector<unsigned>;

    basic_polynomial() = default;
    explicit basic_polynomial(std::size_t nvars) : nvars_(nvars) {}

    static basic_polynomial constant(std::size_t nvars, const T& c)
    {
        basic_polynomial p(nvars);
        if (!c.is_zero()) p.terms_[exponents(nvars, 0)] = c;
        return p;
    }

    static basic_polynomial variable(std::size_t nvars, std::size_t k)
    {
        basic_polynomial p(nvars);
        exponents e(nvars, 0);
        e.at(k) = 1;
        p.terms_[e] = T(1);
        return p;
    }

    static basic_polynomial linear(const std::vector<T>& coeffs)
    {
        basic_polynomial p(coeffs.size());
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (coeffs[k].is_zero()) continue;
            exponents e(coeffs.size(), 0);
            e[k] = 1;
            p.terms_[e] = coeffs[k];
        }
        return p;
    }

    std::size_t nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<exponents, T>& terms() const { return terms_; }

    void add_term(const exponents& e, const T& c)
    {
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
            return;
        }
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }

    basic_polynomial& operator+=(const basic_polynomial& o)
    {
        for (auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    basic_polynomial& operator-=(const basic_polynomial& o)
    {
        for (auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    basic_polynomial& operator*=(const T& s)
    {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& kv : terms_) kv.second *= s;
        return *this;
    }

    friend basic_polynomial operator+(basic_polynomial a, const basic_polynomial& b) { return a += b; }
    friend basic_polynomial operator-(basic_polynomial a, const basic_polynomial& b) { return a -= b; }
    friend basic_polynomial operator*(basic_polynomial a, const T& s) { return a *= s; }
    friend basic_polynomial operator*(const T& s, basic_polynomial a) { return a *= s; }

    friend basic_polynomial operator*(const basic_polynomial& a, const basic_polynomial& b)
    {
        basic_polynomial p(a.nvars_);
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) {
                exponents e(ea);
                for (std::size_t k = 0; k < e.size(); ++k) e[k] += eb[k];
                p.add_term(e, ca * cb);
            }
        return p;
    }

    friend bool operator==(const basic_polynomial& a, const basic_polynomial& b) { return a.terms_ == b.terms_; }

    basic_polynomial pow(unsigned k) const
    {
        basic_polynomial r = constant(nvars_, T(1));
        for (unsigned s = 0; s < k; ++s) r = r * (*this);
        return r;
    }

    basic_polynomial derivative(std::size_t var) const
    {
        basic_polynomial p(nvars_);
        for (auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            exponents d(e);
            d[var] -= 1;
            p.add_term(d, c * T(static_cast<long>(e[var])));
        }
        return p;
    }

    // Replace variable k by images[k]; all images share one variable count.
    basic_polynomial compose(const std::vector<basic_polynomial>& images) const
    {
        std::size_t nv = images.empty() ? 0 : images[0].nvars();
        basic_polynomial r(nv);
        std::vector<std::vector<basic_polynomial>> powers(images.size());
        for (auto& [e, c] : terms_) {
            basic_polynomial t = constant(nv, c);
            for (std::size_t k = 0; k < e.size(); ++k) {
                if (e[k] == 0) continue;
                auto& pk = powers[k];
                if (pk.empty()) pk.push_back(constant(nv, T(1)));
                while (pk.size() <= e[k]) pk.push_back(pk.back() * images[k]);
                t = t * pk[e[k]];
            }
            r += t;
        }
        return r;
    }

private:
    std::size_t nvars_ = 0;
    std::map<exponents, T> terms_;
};

using Polynomial = basic_polynomial<Scalar>;

} // namespace lpx
