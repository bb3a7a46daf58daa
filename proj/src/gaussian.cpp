#include "gkpsim/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace gkpsim {

namespace {

constexpr double pi = std::numbers::pi;

void symmetrize(Eigen::MatrixXcd& M) { M = ((M + M.transpose()) / 2.0).eval(); }

// log det of a complex matrix whose eigenvalues lie in the right half plane
// (guaranteed when Re M is positive definite), principal branch per factor
cxd log_det_rhp(const Eigen::MatrixXcd& M) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw numeric_error("eigen solve failed in log det");
    cxd s = 0.0;
    for (int i = 0; i < M.rows(); ++i) {
        cxd ev = es.eigenvalues()(i);
        if (std::abs(ev) < 1e-300) throw numeric_error("singular block in Gaussian integration");
        s += std::log(ev);
    }
    return s;
}

void require_spd(const Eigen::MatrixXd& M, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
        throw numeric_error(std::string(what) + ": real part of exponent block not positive definite");
}

}  // namespace

GaussianState GaussianState::vacuum(int modes) {
    if (modes < 1) throw usage_error("vacuum needs at least one mode");
    GaussianState st;
    st.n_modes = modes;
    st.A = Eigen::MatrixXcd::Identity(modes, modes);
    st.b = Eigen::VectorXcd::Zero(modes);
    st.scalar = LogComplex::from_log(-0.25 * modes * std::log(pi), 0.0);
    return st;
}

void GaussianState::multiply_exponent(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& v) {
    if (M.rows() != n_vars() || M.cols() != n_vars() || v.size() != n_vars())
        throw usage_error("exponent factor dimension mismatch");
    A += M;
    symmetrize(A);
    b += v;
}

void GaussianState::substitute_linear(const Eigen::MatrixXcd& L, const Eigen::VectorXcd& s) {
    if (L.rows() != n_vars() || L.cols() != n_vars() || s.size() != n_vars())
        throw usage_error("substitution dimension mismatch");
    // psi'(z) = psi(Lz + s): expand -1/2 (Lz+s)^T A (Lz+s) + b^T (Lz+s)
    cxd extra = (b.transpose() * s)(0) - 0.5 * (s.transpose() * A * s)(0);
    Eigen::VectorXcd b_new = L.transpose() * (b - A * s);
    A = (L.transpose() * A * L).eval();
    symmetrize(A);
    b = b_new;
    scalar *= LogComplex::from_log(extra.real(), extra.imag());
}

void GaussianState::integrate_out(const std::vector<int>& idx) {
    if (idx.empty()) return;
    const int n = n_vars();
    std::vector<char> drop(n, 0);
    for (int i : idx) {
        if (i < 0 || i >= n_modes) throw usage_error("can only integrate mode variables");
        if (drop[i]) throw usage_error("duplicate variable in integrate_out");
        drop[i] = 1;
    }
    std::vector<int> keep, gone;
    for (int i = 0; i < n; ++i) (drop[i] ? gone : keep).push_back(i);
    const int nk = static_cast<int>(keep.size());
    const int ng = static_cast<int>(gone.size());

    Eigen::MatrixXcd Akk(nk, nk), Akg(nk, ng), Agg(ng, ng);
    Eigen::VectorXcd bk(nk), bg(ng);
    for (int i = 0; i < nk; ++i) {
        bk(i) = b(keep[i]);
        for (int j = 0; j < nk; ++j) Akk(i, j) = A(keep[i], keep[j]);
        for (int j = 0; j < ng; ++j) Akg(i, j) = A(keep[i], gone[j]);
    }
    for (int i = 0; i < ng; ++i) {
        bg(i) = b(gone[i]);
        for (int j = 0; j < ng; ++j) Agg(i, j) = A(gone[i], gone[j]);
    }
    require_spd(Agg.real(), "integrate_out");

    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Agg);
    Eigen::VectorXcd Agg_inv_bg = lu.solve(bg);
    Eigen::MatrixXcd Agg_inv_Agk = lu.solve(Akg.transpose());

    // int exp(-1/2 u^T Agg u + (bg + coupling)^T u) du, completed square
    cxd extra = 0.5 * (bg.transpose() * Agg_inv_bg)(0) + 0.5 * ng * std::log(2.0 * pi) -
                0.5 * log_det_rhp(Agg);

    A = (Akk - Akg * Agg_inv_Agk).eval();
    symmetrize(A);
    b = bk - Akg * Agg_inv_bg;
    scalar *= LogComplex::from_log(extra.real(), extra.imag());
    n_modes -= ng;
}

void GaussianState::substitute_value(int i, double y) {
    const int n = n_vars();
    if (i < 0 || i >= n) throw usage_error("substitute_value index out of range");
    cxd extra = b(i) * y - 0.5 * A(i, i) * y * y;
    std::vector<int> keep;
    for (int k = 0; k < n; ++k)
        if (k != i) keep.push_back(k);
    Eigen::MatrixXcd A2(n - 1, n - 1);
    Eigen::VectorXcd b2(n - 1);
    for (int r = 0; r < n - 1; ++r) {
        b2(r) = b(keep[r]) - A(keep[r], i) * y;
        for (int c = 0; c < n - 1; ++c) A2(r, c) = A(keep[r], keep[c]);
    }
    A = A2;
    b = b2;
    scalar *= LogComplex::from_log(extra.real(), extra.imag());
    if (i < n_modes)
        --n_modes;
    else
        --n_formal;
}

int GaussianState::add_formal() {
    const int n = n_vars();
    Eigen::MatrixXcd A2 = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    A2.topLeftCorner(n, n) = A;
    Eigen::VectorXcd b2 = Eigen::VectorXcd::Zero(n + 1);
    b2.head(n) = b;
    A = A2;
    b = b2;
    ++n_formal;
    return n;  // index of the new variable
}

void GaussianState::permute_vars(const std::vector<int>& perm) {
    const int n = n_vars();
    if (static_cast<int>(perm.size()) != n) throw usage_error("permutation size mismatch");
    Eigen::MatrixXcd A2(n, n);
    Eigen::VectorXcd b2(n);
    for (int i = 0; i < n; ++i) {
        b2(i) = b(perm[i]);
        for (int j = 0; j < n; ++j) A2(i, j) = A(perm[i], perm[j]);
    }
    A = A2;
    b = b2;
}

Eigen::VectorXd GaussianState::mean() const {
    if (n_formal != 0) throw usage_error("moments undefined with formal variables present");
    const int m = n_modes;
    Eigen::MatrixXd Ar = A.real(), Ai = A.imag();
    require_spd(Ar, "mean");
    Eigen::LLT<Eigen::MatrixXd> llt(Ar);
    Eigen::VectorXd mx = llt.solve(b.real());
    Eigen::VectorXd mp = b.imag() - Ai * mx;
    Eigen::VectorXd out(2 * m);
    out << mx, mp;
    return out;
}

Eigen::MatrixXd GaussianState::covariance() const {
    if (n_formal != 0) throw usage_error("moments undefined with formal variables present");
    const int m = n_modes;
    Eigen::MatrixXd Ar = A.real(), Ai = A.imag();
    require_spd(Ar, "covariance");
    Eigen::MatrixXd Ar_inv = Ar.llt().solve(Eigen::MatrixXd::Identity(m, m));
    Eigen::MatrixXd out(2 * m, 2 * m);
    out.topLeftCorner(m, m) = 0.5 * Ar_inv;
    out.topRightCorner(m, m) = -0.5 * Ar_inv * Ai;
    out.bottomLeftCorner(m, m) = out.topRightCorner(m, m).transpose();
    out.bottomRightCorner(m, m) = 0.5 * (Ar + Ai * Ar_inv * Ai);
    return out;
}

namespace {
// log of integral |psi|^2 = e^{2 log|scalar|} int exp(-x^T Ar x + 2 br^T x)
double log_norm2_of(const GaussianState& st, const char* what) {
    if (st.n_formal != 0) throw usage_error("norm undefined with formal variables present");
    const int m = st.n_modes;
    Eigen::MatrixXd Ar = st.A.real();
    require_spd(Ar, what);
    Eigen::LLT<Eigen::MatrixXd> llt(Ar);
    Eigen::MatrixXd Lmat = llt.matrixL();
    Eigen::VectorXd br = st.b.real();
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(Lmat(i, i));
    return 2.0 * st.scalar.log_mag + 0.5 * m * std::log(pi) - 0.5 * logdet +
           br.dot(llt.solve(br));
}
}  // namespace

double GaussianState::norm2() const {
    if (scalar.zero) return 0.0;
    return std::exp(log_norm2_of(*this, "norm2"));
}

void GaussianState::normalize() {
    if (scalar.zero) throw numeric_error("cannot normalize a zero state");
    scalar.log_mag -= 0.5 * log_norm2_of(*this, "normalize");
}

WavefunctionGrid GaussianState::wavefunction(const RealGrid& grid) const {
    if (n_modes != 1 || n_formal != 0)
        throw usage_error("grid projection needs exactly one mode and no formal variables");
    WavefunctionGrid out;
    out.g = grid;
    std::vector<double> re(grid.n);
    double re_max = -1e300;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        cxd e = -0.5 * A(0, 0) * x * x + b(0) * x;
        re[i] = e.real() + scalar.log_mag;
        re_max = std::max(re_max, re[i]);
    }
    // keep absolute amplitude when it is representable, else rescale to O(1)
    double shift = (scalar.zero || std::abs(re_max) > 300.0) ? re_max : 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        cxd e = -0.5 * A(0, 0) * x * x + b(0) * x;
        out.g.v[i] = scalar.zero ? cxd(0.0, 0.0)
                                 : std::polar(std::exp(re[i] - shift), scalar.phase + e.imag());
    }
    return out;
}

// SymplecticOp --------------------------------------------------------------

SymplecticOp SymplecticOp::identity(int modes) {
    if (modes < 1) throw usage_error("identity needs at least one mode");
    return {Eigen::MatrixXd::Identity(2 * modes, 2 * modes), Eigen::VectorXd::Zero(2 * modes)};
}

namespace {
void check_mode(int m, int mode) {
    if (mode < 0 || mode >= m) throw usage_error("mode index out of range");
}
}  // namespace

SymplecticOp SymplecticOp::squeeze(int m, int mode, double r) {
    check_mode(m, mode);
    SymplecticOp op = identity(m);
    op.S(mode, mode) = std::exp(-r);
    op.S(m + mode, m + mode) = std::exp(r);
    return op;
}

SymplecticOp SymplecticOp::rotation(int m, int mode, double theta) {
    check_mode(m, mode);
    SymplecticOp op = identity(m);
    double c = std::cos(theta), s = std::sin(theta);
    op.S(mode, mode) = c;
    op.S(mode, m + mode) = s;
    op.S(m + mode, mode) = -s;
    op.S(m + mode, m + mode) = c;
    return op;
}

SymplecticOp SymplecticOp::beamsplit(int m, int i, int j, double theta, double phi) {
    check_mode(m, i);
    check_mode(m, j);
    if (i == j) throw usage_error("beam splitter needs two distinct modes");
    // a_i -> cos a_i - e^{-i phi} sin a_j ; a_j -> e^{i phi} sin a_i + cos a_j
    Eigen::Matrix2cd U;
    double c = std::cos(theta), s = std::sin(theta);
    U(0, 0) = c;
    U(0, 1) = -std::polar(s, -phi);
    U(1, 0) = std::polar(s, phi);
    U(1, 1) = c;
    SymplecticOp op = identity(m);
    int xi[2] = {i, j};
    for (int r = 0; r < 2; ++r)
        for (int cidx = 0; cidx < 2; ++cidx) {
            op.S(xi[r], xi[cidx]) = U(r, cidx).real();
            op.S(xi[r], m + xi[cidx]) = -U(r, cidx).imag();
            op.S(m + xi[r], xi[cidx]) = U(r, cidx).imag();
            op.S(m + xi[r], m + xi[cidx]) = U(r, cidx).real();
        }
    return op;
}

SymplecticOp SymplecticOp::sum(int m, int i, int j) {
    check_mode(m, i);
    check_mode(m, j);
    if (i == j) throw usage_error("sum gate needs two distinct modes");
    SymplecticOp op = identity(m);
    op.S(j, i) = 1.0;       // x_j += x_i
    op.S(m + i, m + j) = -1.0;  // p_i -= p_j
    return op;
}

SymplecticOp SymplecticOp::displace(int m, int mode, std::complex<double> alpha) {
    check_mode(m, mode);
    SymplecticOp op = identity(m);
    op.d(mode) = std::numbers::sqrt2 * alpha.real();
    op.d(m + mode) = std::numbers::sqrt2 * alpha.imag();
    return op;
}

SymplecticOp SymplecticOp::then(const SymplecticOp& later) const {
    if (later.S.rows() != S.rows()) throw usage_error("composition mode mismatch");
    return {later.S * S, later.S * d + later.d};
}

double SymplecticOp::symplectic_defect() const {
    const int m = modes();
    Eigen::MatrixXd Om = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    Om.topRightCorner(m, m) = Eigen::MatrixXd::Identity(m, m);
    Om.bottomLeftCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
    return (S.transpose() * Om * S - Om).cwiseAbs().maxCoeff();
}

// state-level operations -----------------------------------------------------

GaussianState two_mode_squeezed(double r) {
    GaussianState st;
    st.n_modes = 2;
    double c2 = std::cosh(2.0 * r), s2 = std::sinh(2.0 * r);
    st.A.resize(2, 2);
    st.A << c2, s2, s2, c2;
    st.b = Eigen::VectorXcd::Zero(2);
    st.scalar = LogComplex::from_log(-0.5 * std::log(pi), 0.0);
    return st;
}

namespace {

// psi -> e^{i dp.x - i dp.dx/2} psi(x - dx): Weyl displacement along (dx, dp)
void apply_phase_space_shift(GaussianState& st, const Eigen::VectorXd& d) {
    const int m = st.n_modes, n = st.n_vars();
    Eigen::VectorXd dx = d.head(m), dp = d.tail(m);
    if (dx.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
        s.head(m) = -dx.cast<cxd>();
        st.substitute_linear(Eigen::MatrixXcd::Identity(n, n), s);
    }
    if (dp.cwiseAbs().maxCoeff() > 0.0) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
        v.head(m) = cxd(0.0, 1.0) * dp.cast<cxd>();
        st.multiply_exponent(Eigen::MatrixXcd::Zero(n, n), v);
        st.scalar *= LogComplex::from_log(0.0, -0.5 * dp.dot(dx));
    }
}

// metaplectic integral kernel for block-decomposed S with invertible B:
//   psi'(x) = c int exp[(i/2)(x^T D B^-1 x - 2 x^T B^-T x' + x'^T B^-1 A x')] psi(x') dx'
// with |c| = (2 pi)^{-m/2} |det B|^{-1/2}; phase fixed real-positive.
void apply_kernel(GaussianState& st, const Eigen::MatrixXd& Ab, const Eigen::MatrixXd& Bb,
                  const Eigen::MatrixXd& Cb, const Eigen::MatrixXd& Db) {
    const int m = st.n_modes, f = st.n_formal;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Bb);
    double abs_det_b = std::abs(lu.determinant());
    if (!(abs_det_b > 1e-250)) throw numeric_error("kernel block is numerically singular");

    Eigen::MatrixXd P = Db * lu.solve(Eigen::MatrixXd::Identity(m, m));
    Eigen::MatrixXd Q = lu.solve(Eigen::MatrixXd::Identity(m, m)).transpose();  // B^-T
    Eigen::MatrixXd R = lu.solve(Ab);

    // adjoin output variables x_out after [x_in, t]
    for (int k = 0; k < m; ++k) st.add_formal();
    const int n = m + f + m;

    const cxd iu(0.0, 1.0);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    Eigen::MatrixXcd cross = iu * Q.cast<cxd>();
    M.block(m + f, m + f, m, m) = -iu * P.cast<cxd>();  // x_out quadratic
    M.block(0, 0, m, m) = -iu * R.cast<cxd>();          // x_in quadratic
    M.block(m + f, 0, m, m) = cross;                    // x_out-x_in coupling
    M.block(0, m + f, m, m) = cross.transpose();

    st.multiply_exponent(M, Eigen::VectorXcd::Zero(n));
    st.scalar *= LogComplex::from_log(-0.5 * m * std::log(2.0 * pi) - 0.5 * std::log(abs_det_b), 0.0);

    std::vector<int> gone(m);
    for (int k = 0; k < m; ++k) gone[k] = k;
    st.integrate_out(gone);  // integrates x_in; n_modes -> 0
    // remaining order: [t_0..t_{f-1}, x_out_0..x_out_{m-1}]; restore modes first
    std::vector<int> perm(m + f);
    for (int k = 0; k < m; ++k) perm[k] = f + k;
    for (int k = 0; k < f; ++k) perm[m + k] = k;
    st.permute_vars(perm);
    st.n_modes = m;
    st.n_formal = f;
}

}  // namespace

void apply_symplectic(GaussianState& st, const SymplecticOp& op) {
    const int m = st.n_modes;
    if (op.modes() != m) throw usage_error("symplectic op mode count mismatch");
    if (op.symplectic_defect() > 1e-9) throw usage_error("matrix is not symplectic");

    Eigen::MatrixXd Ab = op.S.topLeftCorner(m, m), Bb = op.S.topRightCorner(m, m);
    Eigen::MatrixXd Cb = op.S.bottomLeftCorner(m, m), Db = op.S.bottomRightCorner(m, m);
    double scale = op.S.cwiseAbs().maxCoeff();

    if (Bb.cwiseAbs().maxCoeff() <= 1e-13 * std::max(1.0, scale)) {
        // point transform: psi'(x) = |det Ab|^{-1/2} e^{(i/2) x^T Cb Ab^-1 x} psi(Ab^-1 x)
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ab);
        Eigen::MatrixXd Ainv = lu.solve(Eigen::MatrixXd::Identity(m, m));
        const int n = st.n_vars();
        Eigen::MatrixXcd L = Eigen::MatrixXcd::Identity(n, n);
        L.topLeftCorner(m, m) = Ainv.cast<cxd>();
        st.substitute_linear(L, Eigen::VectorXcd::Zero(n));
        st.scalar *= LogComplex::from_log(-0.5 * std::log(std::abs(lu.determinant())), 0.0);
        Eigen::MatrixXd G = Cb * Ainv;
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
        M.topLeftCorner(m, m) = cxd(0.0, -1.0) * (0.5 * (G + G.transpose())).cast<cxd>();
        st.multiply_exponent(M, Eigen::VectorXcd::Zero(n));
    } else {
        // pick a pre-rotation so the remaining map has a well-conditioned B
        const double cands[] = {0.0,       pi / 2,    pi / 4,     -pi / 4,
                                pi / 8,    3 * pi / 8, -pi / 8,   -3 * pi / 8,
                                pi / 16,   5 * pi / 16};
        double best_theta = 0.0, best_score = -1.0;
        for (double th : cands) {
            Eigen::MatrixXd Bp = Bb * std::cos(th) - Ab * std::sin(th);
            double det = std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(Bp).determinant());
            double score = std::pow(det, 1.0 / m);
            if (score > best_score) {
                best_score = score;
                best_theta = th;
            }
        }
        if (best_score <= 1e-8 * std::max(1.0, scale))
            throw numeric_error("could not factor symplectic map for kernel application");
        double th = best_theta;
        if (th != 0.0) {
            // S = S' R(th) with R the same rotation on every mode
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
            apply_kernel(st, std::cos(th) * I, std::sin(th) * I, -std::sin(th) * I,
                         std::cos(th) * I);
            // R(-th): x -> cos x - sin p, p -> sin x + cos p
            Eigen::MatrixXd Rm(2 * m, 2 * m);
            Rm << std::cos(th) * I, -std::sin(th) * I, std::sin(th) * I, std::cos(th) * I;
            Eigen::MatrixXd Sp = op.S * Rm;
            apply_kernel(st, Sp.topLeftCorner(m, m), Sp.topRightCorner(m, m),
                         Sp.bottomLeftCorner(m, m), Sp.bottomRightCorner(m, m));
        } else {
            apply_kernel(st, Ab, Bb, Cb, Db);
        }
    }

    if (op.d.cwiseAbs().maxCoeff() > 0.0) apply_phase_space_shift(st, op.d);
}

void displace(GaussianState& st, int mode, std::complex<double> alpha) {
    if (mode < 0 || mode >= st.n_modes) throw usage_error("mode index out of range");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(2 * st.n_modes);
    d(mode) = std::numbers::sqrt2 * alpha.real();
    d(st.n_modes + mode) = std::numbers::sqrt2 * alpha.imag();
    apply_phase_space_shift(st, d);
}

GaussianState condition_homodyne(const GaussianState& st, int mode, double y) {
    if (mode < 0 || mode >= st.n_modes) throw usage_error("mode index out of range");
    if (st.n_modes < 2) throw usage_error("conditioning needs a mode to keep");
    GaussianState out = st;
    out.substitute_value(mode, y);
    return out;
}

}  // namespace gkpsim
