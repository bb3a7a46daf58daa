#pragma once

#include <Eigen/Dense>
#include <complex>

#include "gkpsim/error.hpp"
#include "gkpsim/grid.hpp"
#include "gkpsim/log_complex.hpp"

namespace gkpsim {

// Pure Gaussian wavefunction in exponent form over variables z:
//   psi(z) = scalar * exp(-1/2 z^T A z + b^T z)
// A complex symmetric with positive-definite real part on normalizable
// states. Variables are mode positions x_0..x_{n_modes-1} followed by
// n_formal spectator parameters (used by the Fock-ancilla machinery; they are
// never integrated, measured, or transformed by unitaries).
//
// Conventions: hbar = 1, [x,p] = i, x = (a + a^dag)/sqrt(2); vacuum has
// Var(x) = 1/2. Quadrature order in phase-space objects is (x_1..x_n,
// p_1..p_n). Metaplectic actions fix the global phase by the principal-branch
// kernel normalization; physical content is phase-insensitive.
struct GaussianState {
    Eigen::MatrixXcd A;
    Eigen::VectorXcd b;
    LogComplex scalar;
    int n_modes = 0;
    int n_formal = 0;

    int n_vars() const { return n_modes + n_formal; }

    static GaussianState vacuum(int modes);

    // engine primitives -----------------------------------------------------

    // multiply by exp(-1/2 z^T M z + v^T z)
    void multiply_exponent(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v);

    // psi'(z) = psi(L z + s), scalar untouched (caller folds any Jacobian)
    void substitute_linear(const Eigen::MatrixXcd& L, const Eigen::VectorXcd& s);

    // Gaussian-integrate the listed variables out (requires Re of that block
    // positive definite); scalar picks up the closed-form factor.
    void integrate_out(const std::vector<int>& idx);

    // pin variable i to value y and remove it; the outcome amplitude stays in
    // scalar (no renormalization)
    void substitute_value(int i, double y);

    // append one formal variable (initialized uncoupled)
    int add_formal();

    void permute_vars(const std::vector<int>& perm);  // perm[new] = old

    // views ------------------------------------------------------------------

    // position/momentum means, length 2*n_modes, (x..,p..); n_formal must be 0
    Eigen::VectorXd mean() const;
    // symmetrized covariance, 2n x 2n
    Eigen::MatrixXd covariance() const;

    double norm2() const;   // integral of |psi|^2 over mode variables
    void normalize();       // scale to unit norm (keeps phase)

    // project a single-mode state onto a grid (n_modes == 1, n_formal == 0);
    // rescaled so the largest sample magnitude is exp(0)-scale, then the
    // caller normalizes
    WavefunctionGrid wavefunction(const RealGrid& grid) const;
};

// Linear phase-space map R -> S R + d in (x.., p..) ordering.
struct SymplecticOp {
    Eigen::MatrixXd S;
    Eigen::VectorXd d;

    int modes() const { return static_cast<int>(S.rows()) / 2; }
    static SymplecticOp identity(int modes);

    // named gates, embedded in an m-mode op ---------------------------------
    // squeeze: x -> e^{-r} x (positive r narrows position)
    static SymplecticOp squeeze(int m, int mode, double r);
    // phase-space rotation by theta = e^{-i theta n}: x -> cos x + sin p
    static SymplecticOp rotation(int m, int mode, double theta);
    // beam splitter exp(theta (e^{i phi} a_i a_j^dag - e^{-i phi} a_i^dag a_j))
    static SymplecticOp beamsplit(int m, int i, int j, double theta, double phi);
    // SUM gate exp(-i x_i p_j): x_j += x_i, p_i -= p_j
    static SymplecticOp sum(int m, int i, int j);
    // displacement exp(alpha a^dag - alpha* a): <x> += sqrt(2) Re alpha,
    // <p> += sqrt(2) Im alpha
    static SymplecticOp displace(int m, int mode, std::complex<double> alpha);

    SymplecticOp then(const SymplecticOp& later) const;  // compose: later * this
    double symplectic_defect() const;                    // ||S^T Omega S - Omega||_inf
};

// Eq.-form constructors ------------------------------------------------------

// Two-mode squeezed vacuum with wavefunction
//   N exp(-1/2 [cosh(2r)(x1^2 + x2^2) + 2 sinh(2r) x1 x2])
// (positive cross term taken verbatim; this equals the two-mode squeezer
// exp(z/2 (a1^dag a2^dag - a1 a2)) acting on vacuum with z = -2r).
GaussianState two_mode_squeezed(double r);

// In-place displacement of one mode (Eq.-3 convention above).
void displace(GaussianState& st, int mode, std::complex<double> alpha);

// Apply a symplectic map exactly (point transform when the x-p mixing block
// vanishes, metaplectic integral kernel otherwise, with an all-mode rotation
// splitting when that block is singular). Throws usage_error when op is not
// symplectic to 1e-9 or mode counts mismatch.
void apply_symplectic(GaussianState& st, const SymplecticOp& op);

// Homodyne projection <y| on one mode: returns the reduced state; the
// discarded Gaussian weight stays in the scalar (norm2 of the result is the
// outcome probability density).
GaussianState condition_homodyne(const GaussianState& st, int mode, double y);

}  // namespace gkpsim
