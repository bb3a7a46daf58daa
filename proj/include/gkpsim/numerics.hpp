#pragma once

#include <vector>

#include "gkpsim/error.hpp"

namespace gkpsim {

// Orthonormal harmonic-oscillator eigenfunction u_n(x): hbar = 1,
// [x,p] = i, x = (a + a^dag)/sqrt(2), so u_0(x) = pi^{-1/4} exp(-x^2/2) and
// integral of u_m u_n is delta_{mn}. Stable three-term recurrence; supported
// for n <= 500 (the carried Gaussian stays inside double range on any grid
// that contains the classically allowed region).
double hermite_u(int n, double x);

// u_0..u_n at one point (recurrence sweep shared with hermite_u).
std::vector<double> hermite_u_all(int n, double x);

// Local classical momentum p_n(x) = sqrt(2n + 1 - x^2). Domain |x| < sqrt(2n+1).
double semiclassical_momentum(int n, double x);

// Two-branch WKB form 2 cos(S(x)) / sqrt(2 pi p_n(x)) with phase
// S(x) = integral_0^x p_n(y) dy (closed form). The constant phase offset is
// deliberately zero; only the envelope and local wavelength are meaningful.
double hermite_semiclassical(int n, double x);

// Airy function Ai(x), absolute error <= 1e-10 on [-30, 10]. Maclaurin series
// for |x| <= 6.6, asymptotic expansions beyond (the crossover is forced by the
// accuracy target: at smaller |x| the optimally truncated asymptotic series on
// the oscillatory side cannot reach 1e-10).
double airy_ai(double x);

// ln C(n, k) via lgamma.
double log_binomial(int n, int k);

// ln n!
double log_factorial(int n);

}  // namespace gkpsim
