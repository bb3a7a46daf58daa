#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <vector>

#include "gkpsim/grid.hpp"

namespace gkpsim {

// Multivariate complex polynomial keyed by exponent tuples. The ordered map
// keeps iteration deterministic; coefficients stay exact under the
// derivative/product recurrences used by the Fock-ancilla machinery (no
// numerical differentiation anywhere).
struct MultiPoly {
    int n_vars = 0;
    std::map<std::vector<int>, cxd> terms;  // exponent tuple (size n_vars) -> coefficient

    static MultiPoly constant(int n_vars, cxd c);
    // c0 + sum_j coeffs[j] z_j
    static MultiPoly linear(const Eigen::VectorXcd& coeffs, cxd c0);

    MultiPoly operator+(const MultiPoly& o) const;
    MultiPoly operator*(const MultiPoly& o) const;
    MultiPoly scaled(cxd c) const;
    MultiPoly derivative(int var) const;
    // set z_var = 0 and remove the variable (tuples shrink by one)
    MultiPoly substitute_zero(int var) const;
    // conjugate coefficients; equals complex conjugation for real arguments
    MultiPoly conjugated() const;

    cxd evaluate(const Eigen::VectorXcd& z) const;

    // total degree over terms with |c| > rel_floor * max|c|; the floor keeps
    // cancellation residue from inflating the reported degree. -1 when empty.
    int total_degree(double rel_floor = 1e-12) const;

    void prune();  // drop exact-zero coefficients
};

}  // namespace gkpsim
