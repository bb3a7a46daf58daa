#pragma once

#include <cstddef>
#include <vector>

#include "gkpsim/gkp_prep.hpp"
#include "gkpsim/grid.hpp"

namespace gkpsim {

// truncation domain for fidelity integrals; against the cubic-phase target
// the domain length equals the target's windowed density mass, since
// |e^{i gamma x^3}| = 1
struct DomainWindow {
    double x_min = 0.0, x_max = 0.0;
    double length() const { return x_max - x_min; }
};

// Two normalizations of the same windowed overlap S = sum_n w_n
// |Int_window e^{-i gamma x^3} psi_n(x) dx|^2:
//   unit        -> sqrt(S / D): 1 for a state that matches the target on the
//                  window, the default reporting convention
//   over_domain -> sqrt(S) / D: carries a residual 1/sqrt(D), kept because
//                  some summaries quote this scaling
enum class FidelityVariant { unit, over_domain };

// Largest node-aligned window inside `w` with an even interval count (the
// quadrature form used throughout); state_fidelity applies this snap
// internally, so pre-aligned windows pass through unchanged.
// support_error if w leaves the grid, usage_error if w is degenerate.
DomainWindow snap_to_grid(const DomainWindow& w, const RealGrid& grid);

// Smallest symmetric-quantile window holding at least `coverage` of the
// state's density mass: each bound sits on the grid node just outside the
// (1-coverage)/2 tail quantile (cumulative trapezoid rule). 0 < coverage < 1.
DomainWindow support_window(const WavefunctionGrid& psi, double coverage);

// Windowed fidelity of a pure state (or a detection mixture) against the
// cubic-phase target e^{i gamma x^3}. States must be normalized.
double state_fidelity(const WavefunctionGrid& psi, double gamma, const DomainWindow& window,
                      FidelityVariant variant = FidelityVariant::unit);
double state_fidelity(const DetectionEnsemble& ensemble, double gamma, const DomainWindow& window,
                      FidelityVariant variant = FidelityVariant::unit);

// Gate fidelity of the ancilla-driven cubic-phase gate at measurement
// outcome q: |Int dx |psi_in(x)|^2 e^{-i gamma (x+q)^3} ancilla(x+q)|,
// with the ancilla resampled at x+q (band-limited off-node). Both states
// share one grid and must be normalized; support_error when the shift
// pushes non-negligible ancilla mass off the grid.
double gate_fidelity(const WavefunctionGrid& psi_in, const WavefunctionGrid& ancilla, double q,
                     double gamma);

struct ScanResult {
    double min_value = 0.0;
    std::size_t argmin = 0;  // index into the scanned family
};

// Minimum of gate_fidelity over a declared family of input states (a scan,
// not a variational infimum).
ScanResult min_gate_fidelity_scan(const WavefunctionGrid& ancilla, double gamma, double q,
                                  const std::vector<WavefunctionGrid>& family);

// Squeezed-displaced Gaussian inputs exp(-e^{2r}(x - center)^2 / 2),
// normalized on the grid, for every (squeeze, center) pair.
std::vector<WavefunctionGrid> gaussian_input_family(const RealGrid& grid,
                                                    const std::vector<double>& squeezes,
                                                    const std::vector<double>& centers);

}  // namespace gkpsim
