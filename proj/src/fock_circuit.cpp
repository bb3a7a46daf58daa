#include "gkpsim/fock_circuit.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "gkpsim/error.hpp"
#include "gkpsim/numerics.hpp"

namespace gkpsim {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int photon_guard = 20;  // factorial growth guard on one derivative order

void require_photons(int n) {
    if (n < 0) throw usage_error("photon count must be nonnegative");
    if (n > photon_guard) throw usage_error("photon count above the factorial-growth guard (20)");
}

// Append one Fock-seeded ancilla: a fresh mode x_a (inserted after the
// existing modes) carrying the generating-function state
//   e^{t^2} <x_a|coherent(sqrt(2) t)> = pi^{-1/4} exp(-x_a^2/2 + 2 t x_a - t^2)
// with t a fresh formal variable (appended last). Derivatives in t at t = 0
// later project onto Fock levels.
void attach_fock_ancilla(GaussianState& st) {
    const int m = st.n_modes, n = st.n_vars();
    Eigen::MatrixXcd a2 = Eigen::MatrixXcd::Zero(n + 2, n + 2);
    Eigen::VectorXcd b2 = Eigen::VectorXcd::Zero(n + 2);
    auto pos = [&](int k) { return k < m ? k : k + 1; };
    for (int r = 0; r < n; ++r) {
        b2(pos(r)) = st.b(r);
        for (int c = 0; c < n; ++c) a2(pos(r), pos(c)) = st.A(r, c);
    }
    a2(m, m) += 1.0;
    a2(m, n + 1) -= 2.0;
    a2(n + 1, m) -= 2.0;
    a2(n + 1, n + 1) += 2.0;
    st.A = std::move(a2);
    st.b = std::move(b2);
    st.scalar *= LogComplex::from_log(-0.25 * std::log(pi), 0.0);
    ++st.n_modes;
    ++st.n_formal;
}

// Apply d^{orders[l]}/dt_l^{orders[l]} at t = 0 for every formal variable:
// for G = exp(-1/2 z^T A z + b^T z), each d/dt maps P G to (dP/dt + P L) G
// with the linear polynomial L = b_t - (A z)_t, all in exact coefficient
// arithmetic; the formals are then pinned to zero and removed.
PolyGaussian finish_derivatives(GaussianState st, const std::vector<int>& orders) {
    if (static_cast<int>(orders.size()) != st.n_formal)
        throw usage_error("derivative order list does not match the formal variables");
    MultiPoly p = MultiPoly::constant(st.n_vars(), 1.0);
    for (int idx = 0; idx < st.n_formal; ++idx) {
        const int v = st.n_modes + idx;
        const MultiPoly ell = MultiPoly::linear(-st.A.row(v).transpose(), st.b(v));
        for (int k = 0; k < orders[static_cast<std::size_t>(idx)]; ++k)
            p = p.derivative(v) + p * ell;
    }
    for (int idx = st.n_formal - 1; idx >= 0; --idx) {
        const int v = st.n_modes + idx;
        p = p.substitute_zero(v);
        st.substitute_value(v, 0.0);
    }
    return PolyGaussian{std::move(p), std::move(st)};
}

// E[z^alpha] for z ~ N(mu, C) via the Gaussian integration-by-parts
// recurrence E[z_i m] = mu_i E[m] + sum_j C_ij E[dm/dz_j], memoized.
double gaussian_moment(const std::vector<int>& alpha, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& cov, std::map<std::vector<int>, double>& cache) {
    int i = -1;
    for (std::size_t k = 0; k < alpha.size(); ++k)
        if (alpha[k] > 0) {
            i = static_cast<int>(k);
            break;
        }
    if (i < 0) return 1.0;
    const auto hit = cache.find(alpha);
    if (hit != cache.end()) return hit->second;
    std::vector<int> rest = alpha;
    --rest[static_cast<std::size_t>(i)];
    double val = mu(i) * gaussian_moment(rest, mu, cov, cache);
    for (std::size_t j = 0; j < rest.size(); ++j) {
        if (rest[j] == 0) continue;
        std::vector<int> lower = rest;
        --lower[j];
        val += cov(i, static_cast<int>(j)) * rest[j] * gaussian_moment(lower, mu, cov, cache);
    }
    cache[alpha] = val;
    return val;
}

// log of norm^2 = |scalar|^2 int |P|^2 exp(-z^T Re(A) z + 2 Re(b)^T z);
// throws when the density mass vanishes (degenerate conditioning).
double log_norm2(const PolyGaussian& pg) {
    if (pg.gauss.n_formal != 0)
        throw usage_error("norm undefined with formal variables present");
    if (pg.gauss.scalar.zero || pg.poly.terms.empty())
        throw numeric_error("homodyne conditioning left a vanishing-probability output");
    const int d = pg.gauss.n_vars();
    const Eigen::MatrixXd m = pg.gauss.A.real();
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw numeric_error("output exponent is not normalizable");
    const Eigen::VectorXd br = pg.gauss.b.real();
    const Eigen::VectorXd mu = llt.solve(br);
    const Eigen::MatrixXd cov = 0.5 * llt.solve(Eigen::MatrixXd::Identity(d, d));
    double logdet = 0.0;
    const Eigen::MatrixXd lmat = llt.matrixL();
    for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(lmat(i, i));
    const double log_base =
        2.0 * pg.gauss.scalar.log_mag + 0.5 * d * std::log(pi) - 0.5 * logdet + br.dot(mu);

    const MultiPoly density = pg.poly.conjugated() * pg.poly;
    std::map<std::vector<int>, double> cache;
    cxd expect = 0.0;
    for (const auto& [key, c] : density.terms) expect += c * gaussian_moment(key, mu, cov, cache);
    const double e = expect.real();
    if (!(e > 0.0) || !std::isfinite(e))
        throw numeric_error("homodyne conditioning left a vanishing-probability output");
    return log_base + std::log(e);
}

}  // namespace

double PolyGaussian::norm2() const {
    if (gauss.scalar.zero || poly.terms.empty()) return 0.0;
    return std::exp(log_norm2(*this));
}

void PolyGaussian::normalize() { gauss.scalar.log_mag -= 0.5 * log_norm2(*this); }

WavefunctionGrid PolyGaussian::wavefunction(const RealGrid& grid) const {
    if (gauss.n_modes != 1 || gauss.n_formal != 0)
        throw usage_error("grid projection needs exactly one mode and no formal variables");
    WavefunctionGrid out;
    out.g = grid;
    std::vector<double> log_gauss(static_cast<std::size_t>(grid.n));
    std::vector<double> phase(static_cast<std::size_t>(grid.n));
    std::vector<cxd> pval(static_cast<std::size_t>(grid.n));
    double top = -std::numeric_limits<double>::infinity();
    Eigen::VectorXcd z(1);
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        const cxd e = -0.5 * gauss.A(0, 0) * x * x + gauss.b(0) * x;
        z(0) = x;
        const cxd p = poly.evaluate(z);
        log_gauss[static_cast<std::size_t>(i)] = e.real() + gauss.scalar.log_mag;
        phase[static_cast<std::size_t>(i)] = e.imag() + gauss.scalar.phase;
        pval[static_cast<std::size_t>(i)] = p;
        if (p != cxd(0.0, 0.0))
            top = std::max(top, log_gauss[static_cast<std::size_t>(i)] + std::log(std::abs(p)));
    }
    // keep absolute amplitude when representable, else rescale to O(1)
    const double shift = (gauss.scalar.zero || std::abs(top) > 300.0) ? top : 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const cxd p = pval[static_cast<std::size_t>(i)];
        if (gauss.scalar.zero || p == cxd(0.0, 0.0)) {
            out.g.v[static_cast<std::size_t>(i)] = 0.0;
            continue;
        }
        out.g.v[static_cast<std::size_t>(i)] =
            std::polar(std::exp(log_gauss[static_cast<std::size_t>(i)] +
                                std::log(std::abs(p)) - shift),
                       phase[static_cast<std::size_t>(i)] + std::arg(p));
    }
    return out;
}

int StagedCircuit::total_photons() const {
    int total = 0;
    for (const auto& stage : stages) {
        require_photons(stage.ancilla_photons);
        total += stage.ancilla_photons;
    }
    return total;
}

FockDerivativeReport fock_via_derivative(int n, const RealGrid& grid) {
    require_photons(n);
    // start from an empty exponent so the attached pair is exactly the
    // generating function over (x, t)
    GaussianState st;
    st.A = Eigen::MatrixXcd::Zero(0, 0);
    st.b = Eigen::VectorXcd::Zero(0);
    attach_fock_ancilla(st);

    PolyGaussian raw = finish_derivatives(std::move(st), {n});
    FockDerivativeReport rep;
    rep.degree = raw.degree();
    rep.constant = std::sqrt(raw.norm2());
    const double target = std::exp(0.5 * (n * std::log(2.0) + log_factorial(n)));
    rep.constant_rel_error = std::abs(rep.constant - target) / target;

    raw.normalize();
    WavefunctionGrid w = raw.wavefunction(grid);
    w.normalize();
    WavefunctionGrid un;
    un.g = RealGrid::make(grid.x_min, grid.x_max, grid.n);
    for (int i = 0; i < grid.n; ++i)
        un.g.v[static_cast<std::size_t>(i)] = hermite_u(n, grid.x(i));
    un.normalize();
    rep.grid_overlap = std::abs(overlap(un, w));
    rep.state = std::move(raw);
    return rep;
}

PolyGaussian single_ancilla_output(const SymplecticOp& circuit, const GaussianState& psi_in,
                                   int n2, double y2) {
    if (psi_in.n_modes != 1 || psi_in.n_formal != 0)
        throw usage_error("input must be a single-mode state without formal variables");
    require_photons(n2);
    if (circuit.modes() != 2) throw usage_error("circuit must act on exactly two modes");
    GaussianState st = psi_in;
    attach_fock_ancilla(st);
    apply_symplectic(st, circuit);
    GaussianState cond = condition_homodyne(st, 1, y2);
    PolyGaussian out = finish_derivatives(std::move(cond), {n2});
    if (out.degree() > 2 * n2)
        throw numeric_error("output degree exceeds the ancilla-photon bound");
    out.normalize();
    return out;
}

PolyGaussian staged_output(const StagedCircuit& circuit, const GaussianState& psi_in) {
    if (psi_in.n_modes < 1 || psi_in.n_formal != 0)
        throw usage_error("input must be a mode-only state without formal variables");
    if (circuit.stages.empty()) throw usage_error("staged circuit has no stages");
    const int total = circuit.total_photons();

    GaussianState st = psi_in;
    std::vector<int> orders;
    orders.reserve(circuit.stages.size());
    for (const auto& stage : circuit.stages) {
        attach_fock_ancilla(st);
        orders.push_back(stage.ancilla_photons);
        if (stage.op.modes() != st.n_modes)
            throw usage_error("stage operator must cover the modes plus the fresh ancilla");
        apply_symplectic(st, stage.op);
        const int meas = stage.measure_mode < 0 ? st.n_modes - 1 : stage.measure_mode;
        if (meas < 0 || meas >= st.n_modes) throw usage_error("measured mode out of range");
        st = condition_homodyne(st, meas, stage.outcome);
        if (stage.feedforward) {
            const SymplecticOp ff = stage.feedforward(stage.outcome);
            if (ff.modes() != st.n_modes)
                throw usage_error("feedforward must cover the remaining modes");
            apply_symplectic(st, ff);
        }
    }
    PolyGaussian out = finish_derivatives(std::move(st), orders);
    if (out.degree() > 2 * total)
        throw numeric_error("output degree exceeds the ancilla-photon bound");
    out.normalize();
    return out;
}

WavefunctionGrid apply_ancilla_gate_circuit(const WavefunctionGrid& psi_in,
                                            const WavefunctionGrid& ancilla, double q,
                                            double gamma, bool apply_correction) {
    const RealGrid& g = psi_in.g;
    if (g.x_min != ancilla.g.x_min || g.x_max != ancilla.g.x_max || g.n != ancilla.g.n)
        throw usage_error("input and ancilla must share one grid");
    if (std::abs(psi_in.norm2() - 1.0) > 1e-6 || std::abs(ancilla.norm2() - 1.0) > 1e-6)
        throw usage_error("gate circuit requires normalized states");
    require_shift_support(ancilla, q);
    const std::vector<cxd> shifted = resample_shifted(ancilla, q);
    WavefunctionGrid out;
    out.g = RealGrid::make(g.x_min, g.x_max, g.n);
    for (int i = 0; i < g.n; ++i) {
        cxd v = psi_in.g.v[static_cast<std::size_t>(i)] * shifted[static_cast<std::size_t>(i)];
        if (apply_correction) {
            const double x = g.x(i), xq = x + q;
            v *= std::polar(1.0, gamma * (x * x * x - xq * xq * xq));
        }
        out.g.v[static_cast<std::size_t>(i)] = v;
    }
    if (!(out.norm2() > 1e-300))
        throw numeric_error("gate output has vanishing norm (disjoint supports)");
    out.normalize();
    return out;
}

unsigned long long coefficient_count(int n_modes, int total_photons) {
    if (n_modes < 1) throw usage_error("need at least one input mode");
    if (total_photons < 0) throw usage_error("photon count must be nonnegative");
    using u128 = unsigned __int128;
    constexpr u128 u128_max = ~static_cast<u128>(0);
    u128 acc = 0;
    for (int l = 1; l <= 2 * total_photons; ++l) {
        u128 c = 1;  // C(n_modes + l - 1, l), exact multiplicative form
        for (int i = 1; i <= l; ++i) {
            const u128 factor = static_cast<u128>(n_modes - 1 + i);
            if (c > u128_max / factor)
                throw numeric_error("coefficient count exceeds the integer range");
            c = c * factor / static_cast<u128>(i);
        }
        if (acc > u128_max - c) throw numeric_error("coefficient count exceeds the integer range");
        acc += c;
    }
    if (acc > u128_max / 2) throw numeric_error("coefficient count exceeds the integer range");
    acc *= 2;
    if (acc > static_cast<u128>(std::numeric_limits<unsigned long long>::max()))
        throw numeric_error("coefficient count exceeds the 64-bit range");
    return static_cast<unsigned long long>(acc);
}

bool gate_is_two_mode(GateSpec::Kind kind) {
    return kind == GateSpec::Kind::beamsplit || kind == GateSpec::Kind::sum ||
           kind == GateSpec::Kind::two_mode_squeeze;
}

SymplecticOp gate_symplectic(const GateSpec& gate, int modes) {
    if (modes < 1) throw usage_error("gate needs at least one mode");
    if (gate.a < 0 || gate.a >= modes) throw usage_error("gate mode index out of range");
    if (gate_is_two_mode(gate.kind)) {
        if (gate.b < 0 || gate.b >= modes) throw usage_error("gate mode index out of range");
        if (gate.b == gate.a) throw usage_error("two-mode gate needs distinct modes");
    }
    switch (gate.kind) {
        case GateSpec::Kind::squeeze:
            return SymplecticOp::squeeze(modes, gate.a, gate.p1);
        case GateSpec::Kind::phase:
            return SymplecticOp::rotation(modes, gate.a, gate.p1);
        case GateSpec::Kind::beamsplit:
            return SymplecticOp::beamsplit(modes, gate.a, gate.b, gate.p1, gate.p2);
        case GateSpec::Kind::sum:
            return SymplecticOp::sum(modes, gate.a, gate.b);
        case GateSpec::Kind::displace:
            return SymplecticOp::displace(modes, gate.a, cxd(gate.p1, gate.p2));
        case GateSpec::Kind::two_mode_squeeze: {
            // a_a -> cosh(r) a_a + sinh(r) a_b^dag
            SymplecticOp op = SymplecticOp::identity(modes);
            const double ch = std::cosh(gate.p1), sh = std::sinh(gate.p1);
            const int xa = gate.a, xb = gate.b, pa = modes + gate.a, pb = modes + gate.b;
            op.S(xa, xa) = ch;
            op.S(xa, xb) = sh;
            op.S(xb, xa) = sh;
            op.S(xb, xb) = ch;
            op.S(pa, pa) = ch;
            op.S(pa, pb) = -sh;
            op.S(pb, pa) = -sh;
            op.S(pb, pb) = ch;
            return op;
        }
    }
    throw usage_error("unknown gate kind");
}

SymplecticOp compose_gates(const std::vector<GateSpec>& gates, int modes) {
    SymplecticOp op = SymplecticOp::identity(modes);
    for (const GateSpec& g : gates) op = op.then(gate_symplectic(g, modes));
    return op;
}

}  // namespace gkpsim
