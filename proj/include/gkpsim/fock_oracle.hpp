#pragma once

#include <vector>

#include "gkpsim/fock_circuit.hpp"
#include "gkpsim/grid.hpp"

namespace gkpsim {

// Brute-force engine in a truncated number basis: dense per-mode tensors,
// gate unitaries built by matrix exponentials of the truncated quadratic
// generators, homodyne projections by narrow Gaussian bras with Richardson
// extrapolation in the bra width. Everything here is independent of the
// polynomial x Gaussian pipeline, so agreement between the two is evidence
// for both.
struct FockOracleState {
    int modes = 0;
    int cutoff = 0;               // number-basis dimension per mode
    std::vector<cxd> amplitudes;  // size cutoff^modes, mode 0 slowest
    double edge_population = 0.0; // worst top-level mass seen while running

    double norm2() const;
    void normalize();  // throws numeric_error on a vanishing state
    cxd overlap_with(const FockOracleState& other) const;

    // one remaining mode: psi(x) = sum_n amp[n] u_n(x)
    WavefunctionGrid wavefunction(const RealGrid& grid) const;

    // first and symmetrized second quadrature moments (x..., p... ordering),
    // computed on the normalized state
    Eigen::VectorXd quadrature_mean() const;
    Eigen::MatrixXd quadrature_covariance() const;
};

// Apply a gate list to a product of number states; no measurements. Throws
// numeric_error if any mode's top level ever holds more than 1e-6 of the
// state (the cutoff is too small to trust).
FockOracleState fock_oracle_apply(const std::vector<GateSpec>& gates,
                                  const std::vector<int>& input_photons, int cutoff);

// One measurement round: a fresh number-state ancilla is appended as the
// last mode, the gates act on all current modes, one mode is projected onto
// the homodyne outcome, and the optional feedforward gates act on the
// remaining (renumbered) modes.
struct OracleStage {
    std::vector<GateSpec> gates;
    int ancilla_photons = 0;
    double outcome = 0.0;
    int measure_mode = -1;  // -1 = the fresh ancilla
    std::vector<GateSpec> feedforward;
};

struct OracleCircuit {
    std::vector<OracleStage> stages;
};

// Run the staged circuit on number-state inputs. Homodyne bras use widths
// {0.1, 0.05, 0.025} and two Richardson steps, leaving O(sigma^6) error.
FockOracleState fock_oracle_run(const OracleCircuit& circuit,
                                const std::vector<int>& input_photons, int cutoff);

// The same circuit for the exact pipeline. Feedforward gate lists are fixed
// per stage (they do not read the outcome), matching the oracle semantics.
StagedCircuit to_staged_circuit(const OracleCircuit& circuit, int input_modes);

}  // namespace gkpsim
