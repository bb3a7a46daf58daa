#pragma once

#include <complex>
#include <vector>

#include "gkpsim/error.hpp"

namespace gkpsim {

using cxd = std::complex<double>;

// Uniform 1-D grid with complex samples. Composite Simpson is the one
// quadrature rule used on grids, so n is odd everywhere it matters.
struct RealGrid {
    double x_min = 0.0;
    double x_max = 0.0;
    int n = 0;
    std::vector<cxd> v;

    double dx() const { return (x_max - x_min) / (n - 1); }
    double x(int i) const { return x_min + i * dx(); }

    static RealGrid make(double x_min, double x_max, int n);

    // index of the grid point nearest to x0 (clamped)
    int nearest_index(double x0) const;
};

// Composite Simpson over the whole grid. Requires odd n >= 3.
cxd integrate(const RealGrid& g);
double integrate_real(const std::vector<double>& f, double dx);
cxd integrate_complex(const std::vector<cxd>& f, double dx);

// Simpson over the inclusive index range [i0, i1] of f (i1-i0 even).
cxd integrate_complex_range(const std::vector<cxd>& f, double dx, int i0, int i1);

// Wavefunction samples on a RealGrid.
struct WavefunctionGrid {
    RealGrid g;
    bool normalized = false;

    double norm2() const;                 // Simpson of |psi|^2
    void normalize();                     // rescale to unit norm
    void align_global_phase();            // rotate max-|sample| to real positive
    std::vector<double> density() const;  // |psi|^2 samples

    // true when |psi| at both edges is below tol * max|psi|
    bool edge_decay_ok(double tol = 1e-6) const;
};

// L2 distance between two equally-gridded states after optimal global-phase
// alignment, relative to the norm of a. Grids must match exactly.
double rel_l2_distance_phase_aligned(const WavefunctionGrid& a, const WavefunctionGrid& b);

// <a|b> by Simpson on a shared grid.
cxd overlap(const WavefunctionGrid& a, const WavefunctionGrid& b);

// Samples of psi(x + q) on psi's own axis. Exact index roll when q is an
// integer multiple of dx (within 1e-12 relative); band-limited (sinc)
// interpolation otherwise. Out-of-range points are zero-filled; use
// require_shift_support() first when the tail matters.
std::vector<cxd> resample_shifted(const WavefunctionGrid& psi, double q);

// Error out when shifting by q would push samples carrying more than
// tol * max|psi| off the grid.
void require_shift_support(const WavefunctionGrid& psi, double q, double tol = 1e-9);

}  // namespace gkpsim
