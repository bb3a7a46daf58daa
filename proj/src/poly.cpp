#include "gkpsim/poly.hpp"

#include <algorithm>
#include <cmath>

#include "gkpsim/error.hpp"

namespace gkpsim {

namespace {
void require_var(const MultiPoly& p, int var) {
    if (var < 0 || var >= p.n_vars) throw usage_error("polynomial variable index out of range");
}
}  // namespace

MultiPoly MultiPoly::constant(int n_vars, cxd c) {
    if (n_vars < 0) throw usage_error("negative variable count");
    MultiPoly p;
    p.n_vars = n_vars;
    if (c != cxd(0.0, 0.0)) p.terms[std::vector<int>(static_cast<std::size_t>(n_vars), 0)] = c;
    return p;
}

MultiPoly MultiPoly::linear(const Eigen::VectorXcd& coeffs, cxd c0) {
    MultiPoly p = constant(static_cast<int>(coeffs.size()), c0);
    for (int j = 0; j < coeffs.size(); ++j) {
        if (coeffs(j) == cxd(0.0, 0.0)) continue;
        std::vector<int> key(static_cast<std::size_t>(p.n_vars), 0);
        key[static_cast<std::size_t>(j)] = 1;
        p.terms[key] += coeffs(j);
    }
    return p;
}

MultiPoly MultiPoly::operator+(const MultiPoly& o) const {
    if (n_vars != o.n_vars) throw usage_error("polynomial variable count mismatch");
    MultiPoly p = *this;
    for (const auto& [key, c] : o.terms) p.terms[key] += c;
    p.prune();
    return p;
}

MultiPoly MultiPoly::operator*(const MultiPoly& o) const {
    if (n_vars != o.n_vars) throw usage_error("polynomial variable count mismatch");
    MultiPoly p;
    p.n_vars = n_vars;
    for (const auto& [ka, ca] : terms)
        for (const auto& [kb, cb] : o.terms) {
            std::vector<int> key(ka.size());
            for (std::size_t i = 0; i < ka.size(); ++i) key[i] = ka[i] + kb[i];
            p.terms[key] += ca * cb;
        }
    p.prune();
    return p;
}

MultiPoly MultiPoly::scaled(cxd c) const {
    MultiPoly p;
    p.n_vars = n_vars;
    if (c == cxd(0.0, 0.0)) return p;
    for (const auto& [key, coeff] : terms) p.terms[key] = coeff * c;
    return p;
}

MultiPoly MultiPoly::derivative(int var) const {
    require_var(*this, var);
    MultiPoly p;
    p.n_vars = n_vars;
    for (const auto& [key, c] : terms) {
        const int k = key[static_cast<std::size_t>(var)];
        if (k == 0) continue;
        std::vector<int> down = key;
        --down[static_cast<std::size_t>(var)];
        p.terms[down] += static_cast<double>(k) * c;
    }
    p.prune();
    return p;
}

MultiPoly MultiPoly::substitute_zero(int var) const {
    require_var(*this, var);
    MultiPoly p;
    p.n_vars = n_vars - 1;
    for (const auto& [key, c] : terms) {
        if (key[static_cast<std::size_t>(var)] != 0) continue;
        std::vector<int> shrunk;
        shrunk.reserve(key.size() - 1);
        for (std::size_t i = 0; i < key.size(); ++i)
            if (static_cast<int>(i) != var) shrunk.push_back(key[i]);
        p.terms[shrunk] = c;
    }
    return p;
}

MultiPoly MultiPoly::conjugated() const {
    MultiPoly p;
    p.n_vars = n_vars;
    for (const auto& [key, c] : terms) p.terms[key] = std::conj(c);
    return p;
}

cxd MultiPoly::evaluate(const Eigen::VectorXcd& z) const {
    if (static_cast<int>(z.size()) != n_vars)
        throw usage_error("evaluation point dimension mismatch");
    cxd acc = 0.0;
    for (const auto& [key, c] : terms) {
        cxd mono = c;
        for (std::size_t i = 0; i < key.size(); ++i)
            for (int k = 0; k < key[i]; ++k) mono *= z(static_cast<int>(i));
        acc += mono;
    }
    return acc;
}

int MultiPoly::total_degree(double rel_floor) const {
    double cmax = 0.0;
    for (const auto& [key, c] : terms) cmax = std::max(cmax, std::abs(c));
    int deg = -1;
    for (const auto& [key, c] : terms) {
        if (std::abs(c) <= rel_floor * cmax) continue;
        int d = 0;
        for (int k : key) d += k;
        deg = std::max(deg, d);
    }
    return deg;
}

void MultiPoly::prune() {
    for (auto it = terms.begin(); it != terms.end();)
        it = (it->second == cxd(0.0, 0.0)) ? terms.erase(it) : std::next(it);
}

}  // namespace gkpsim
