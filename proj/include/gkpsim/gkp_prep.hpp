#pragma once

#include <utility>
#include <vector>

#include "gkpsim/grid.hpp"

namespace gkpsim {

// Parameters of the conditional state prepared by displacing one arm of a
// two-mode squeezed vacuum and photon-counting it: measurement outcome n2,
// squeezing r, momentum displacement p0, detector efficiency eta.
struct PrepParams {
    int n2 = 0;
    double r = 0.0;
    double p0 = 0.0;
    double eta = 1.0;

    void validate() const;  // throws usage_error on out-of-range fields
};

// Mixture of conditional states produced by an inefficient photon counter:
// (weight, state) members for true photon numbers n = n2..n_max, plus the
// probability deficit left above the truncation.
struct DetectionEnsemble {
    std::vector<std::pair<double, WavefunctionGrid>> members;
    int n_max = 0;
    double deficit = 0.0;
};

// cubic coefficient of the target phase, 1/(6 sqrt(2 n2 + 1))
double gkp_gamma(int n2);
// linear coefficient of the counter-propagating branch, 2 sqrt(2 n2 + 1)
double gkp_beta(int n2);

// Exact conditional state: N e^{-i p0 tanh(r) x} sum_m C(n2,m)(-tanh r)^m
// (i p0 sech^2 r)^{n2-m} u_m(x), with u_m orthonormal (each term carries the
// extra sqrt(2^m m!) relative to the bare Hermite-Gaussian form) and the
// coefficients built in log form. L2-normalized on the grid.
// Throws support_error when the grid does not reach +-(sqrt(2 n2 + 1) + 5),
// numeric_error when every coefficient vanishes (zero-probability outcome).
WavefunctionGrid gkp_exact_state(const PrepParams& params, const RealGrid& grid);

// Two-branch small-x approximation N (e^{i gamma x^3} + e^{i beta x}),
// normalized over the grid window.
WavefunctionGrid gkp_approx_state(int n2, const RealGrid& grid);

// Momentum-displaced Fock state N e^{i sqrt(2 n2 + 1) x} u_{n2}(x); the
// dominant term of the exact state. Same support requirement as above.
WavefunctionGrid displaced_fock_ancilla(int n2, const RealGrid& grid);

// Probability that a detector of efficiency eta reports n2 clicks when n
// photons arrive: C(n, n2) eta^n2 (1-eta)^(n-n2). Not normalized over n.
double detection_likelihood(int n, int n2, double eta);

// Conditional mixture given the report n2: weights are the detection
// likelihoods normalized over n >= n2 (an extra factor eta, making the full
// ensemble sum to one); zero-weight members are dropped.
DetectionEnsemble detector_ensemble(const PrepParams& params, const RealGrid& grid, int n_max);

}  // namespace gkpsim
