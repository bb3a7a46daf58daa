#pragma once

#include <functional>
#include <vector>

#include "gkpsim/gaussian.hpp"
#include "gkpsim/grid.hpp"
#include "gkpsim/poly.hpp"

namespace gkpsim {

// Output class of Gaussian circuits on Fock-state ancillae: a multivariate
// polynomial times a Gaussian exponent over the surviving mode positions.
// Circuits with N total ancilla photons stay inside this class with
// polynomial degree bounded by 2N.
struct PolyGaussian {
    MultiPoly poly;       // over the same variable order as gauss (modes first)
    GaussianState gauss;  // finished outputs carry n_formal == 0

    int n_vars() const { return gauss.n_vars(); }
    int degree() const { return poly.total_degree(); }

    double norm2() const;  // exact Gaussian-moment evaluation (no grids)
    void normalize();

    // single-mode grid projection, rescaled like GaussianState::wavefunction
    // (caller normalizes)
    WavefunctionGrid wavefunction(const RealGrid& grid) const;
};

// Check of the generating-function identity behind the whole module: the
// n-th t-derivative of exp(t^2) |coherent(sqrt(2) t)> at t = 0 equals
// sqrt(2^n n!) |n>. Returns the raw derivative output plus the measured
// deviations (constant against sqrt(2^n n!), grid overlap against
// hermite_u(n, .)).
struct FockDerivativeReport {
    PolyGaussian state;  // normalized output
    int degree = 0;
    double constant = 0.0;  // sqrt(norm2) of the raw derivative
    double constant_rel_error = 0.0;
    double grid_overlap = 0.0;  // |<u_n|state>| on the supplied grid
};
FockDerivativeReport fock_via_derivative(int n, const RealGrid& grid);

// One Gaussian circuit stage with one fresh Fock-seeded ancilla appended as
// the last mode. `op` acts on all modes present after attachment; afterwards
// `measure_mode` (default: the fresh ancilla) is homodyned at `outcome`, and
// the optional feedforward (a function of the outcome) acts on the remaining
// modes.
struct CircuitStage {
    SymplecticOp op;
    int ancilla_photons = 0;
    double outcome = 0.0;
    int measure_mode = -1;  // -1 selects the freshly attached ancilla
    std::function<SymplecticOp(double)> feedforward;
};

struct StagedCircuit {
    std::vector<CircuitStage> stages;
    int total_photons() const;
};

// Single-stage convenience form: 2-mode circuit on (psi_in, ancilla with n2
// photons), ancilla homodyned at y2. Returns the normalized polynomial x
// Gaussian over the surviving mode.
PolyGaussian single_ancilla_output(const SymplecticOp& circuit, const GaussianState& psi_in,
                                   int n2, double y2);

// Full staged pipeline; output polynomial degree is checked against 2N.
PolyGaussian staged_output(const StagedCircuit& circuit, const GaussianState& psi_in);

// Grid-level measurement-gate circuit: psi_out(x) = psi_in(x) *
// ancilla(x + q), renormalized; with the correction on, multiplied by
// exp(i [gamma x^3 - gamma (x+q)^3]) so a cubic-phase ancilla teleports the
// cubic gate independent of the homodyne outcome q.
WavefunctionGrid apply_ancilla_gate_circuit(const WavefunctionGrid& psi_in,
                                            const WavefunctionGrid& ancilla, double q,
                                            double gamma, bool apply_correction);

// Worst-case coefficient count for a degree-2N complex polynomial in n
// variables (real coefficient pairs): 2 * sum_{l=1}^{2N} C(n+l-1, l).
// Exact integer arithmetic; throws numeric_error past the 64-bit range.
unsigned long long coefficient_count(int n_modes, int total_photons);

// Named Gaussian gates: the circuit vocabulary shared by the JSON circuit
// format, the exact pipeline, and the truncated-Fock oracle. `a`, `b` are
// mode indices (`b` ignored by one-mode kinds).
//   squeeze(r)             p1 = r          x_a -> e^{-r} x_a
//   phase(theta)           p1 = theta      phase-space rotation e^{-i theta n}
//   beamsplit(theta, phi)  p1, p2          exp(theta (e^{i phi} a_a a_b^dag - h.c.))
//   sum()                                  exp(-i x_a p_b): x_b += x_a
//   displace(re, im)       p1 + i p2       exp(alpha a^dag - alpha^* a)
//   two_mode_squeeze(r)    p1 = r          exp(r (a_a^dag a_b^dag - a_a a_b))
struct GateSpec {
    enum class Kind { squeeze, phase, beamsplit, sum, displace, two_mode_squeeze };
    Kind kind = Kind::phase;
    int a = 0, b = 0;
    double p1 = 0.0, p2 = 0.0;
};

bool gate_is_two_mode(GateSpec::Kind kind);

// the gate's exact phase-space action, embedded in an m-mode operator
SymplecticOp gate_symplectic(const GateSpec& gate, int modes);

// left-to-right composition of a gate list into one operator
SymplecticOp compose_gates(const std::vector<GateSpec>& gates, int modes);

}  // namespace gkpsim
