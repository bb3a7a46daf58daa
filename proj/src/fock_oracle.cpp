#include "gkpsim/fock_oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <utility>

#include "gkpsim/numerics.hpp"

namespace gkpsim {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double edge_tol = 1e-6;
constexpr int max_live_modes = 3;
constexpr int min_cutoff = 2;
constexpr int max_cutoff = 40;

long ipow(long base, int e) {
    long r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

void validate_cutoff(int cutoff) {
    if (cutoff < min_cutoff || cutoff > max_cutoff)
        throw usage_error("oracle cutoff must lie in [2, 40]");
}

Eigen::MatrixXcd lowering(int d) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const int d = static_cast<int>(A.rows());
    Eigen::MatrixXcd K(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) K.block(i * d, k * d, d, d) = A(i, k) * B;
    return K;
}

// Unitary on the truncated basis: the generators below are antihermitian by
// construction, so the exponential is exactly unitary and truncation shows
// up only as population reaching the top level (watched by edge_mass).
// Two-mode results are indexed (n_a * d + n_b) in the gate's (a, b) order.
Eigen::MatrixXcd gate_unitary(const GateSpec& g, int d) {
    using K = GateSpec::Kind;
    const Eigen::MatrixXcd a = lowering(d);
    const Eigen::MatrixXcd ad = a.adjoint();
    switch (g.kind) {
        case K::squeeze:
            return ((0.5 * g.p1) * (a * a - ad * ad)).exp();
        case K::phase: {
            Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(d, d);
            for (int n = 0; n < d; ++n) u(n, n) = std::polar(1.0, -g.p1 * n);
            return u;
        }
        case K::displace: {
            const cxd alpha(g.p1, g.p2);
            return (alpha * ad - std::conj(alpha) * a).exp();
        }
        case K::beamsplit: {
            const cxd e = std::polar(1.0, g.p2);
            return (g.p1 * (e * kron(a, ad) - std::conj(e) * kron(ad, a))).exp();
        }
        case K::sum: {
            const Eigen::MatrixXcd x = (a + ad) / std::sqrt(2.0);
            const Eigen::MatrixXcd p = cxd(0.0, -1.0) * (a - ad) / std::sqrt(2.0);
            return (cxd(0.0, -1.0) * kron(x, p)).exp();
        }
        case K::two_mode_squeeze:
            return (g.p1 * (kron(ad, ad) - kron(a, a))).exp();
    }
    throw usage_error("unknown gate kind");
}

struct Tensor {
    int modes = 0;
    int d = 0;
    std::vector<cxd> amp;

    long stride(int k) const { return ipow(d, modes - 1 - k); }
    long total() const { return static_cast<long>(amp.size()); }
};

double squared_norm(const Tensor& t) {
    double s = 0.0;
    for (const cxd& v : t.amp) s += std::norm(v);
    return s;
}

// worst relative mass sitting in any mode's top level
double edge_mass(const Tensor& t) {
    const double n2 = squared_norm(t);
    if (!(n2 > 0.0)) return 0.0;
    double worst = 0.0;
    for (int k = 0; k < t.modes; ++k) {
        const long s = t.stride(k);
        double m = 0.0;
        for (long idx = 0; idx < t.total(); ++idx)
            if ((idx / s) % t.d == t.d - 1) m += std::norm(t.amp[idx]);
        worst = std::max(worst, m / n2);
    }
    return worst;
}

void check_edge(const Tensor& t, double& worst_seen) {
    worst_seen = std::max(worst_seen, edge_mass(t));
    if (worst_seen > edge_tol)
        throw numeric_error("number-basis cutoff too small: top level holds more than 1e-6");
}

void apply_single(Tensor& t, int k, const Eigen::MatrixXcd& U) {
    const long s = t.stride(k);
    Eigen::VectorXcd x(t.d);
    for (long block = 0; block < t.total(); block += t.d * s)
        for (long inner = 0; inner < s; ++inner) {
            const long base = block + inner;
            for (int n = 0; n < t.d; ++n) x(n) = t.amp[base + n * s];
            const Eigen::VectorXcd y = U * x;
            for (int n = 0; n < t.d; ++n) t.amp[base + n * s] = y(n);
        }
}

void apply_pair(Tensor& t, int ka, int kb, const Eigen::MatrixXcd& U) {
    const long sa = t.stride(ka), sb = t.stride(kb);
    const int d = t.d;
    Eigen::VectorXcd x(d * d);
    for (long idx = 0; idx < t.total(); ++idx) {
        if ((idx / sa) % d != 0 || (idx / sb) % d != 0) continue;
        for (int na = 0; na < d; ++na)
            for (int nb = 0; nb < d; ++nb) x(na * d + nb) = t.amp[idx + na * sa + nb * sb];
        const Eigen::VectorXcd y = U * x;
        for (int na = 0; na < d; ++na)
            for (int nb = 0; nb < d; ++nb) t.amp[idx + na * sa + nb * sb] = y(na * d + nb);
    }
}

void validate_gate_modes(const GateSpec& g, int modes) {
    if (g.a < 0 || g.a >= modes) throw usage_error("gate mode index out of range");
    if (gate_is_two_mode(g.kind)) {
        if (g.b < 0 || g.b >= modes) throw usage_error("gate mode index out of range");
        if (g.b == g.a) throw usage_error("two-mode gate needs distinct modes");
    }
}

using PreparedGate = std::pair<GateSpec, Eigen::MatrixXcd>;

void apply_gates(Tensor& t, const std::vector<PreparedGate>& gates, double& worst_edge) {
    for (const PreparedGate& g : gates) {
        validate_gate_modes(g.first, t.modes);
        if (gate_is_two_mode(g.first.kind))
            apply_pair(t, g.first.a, g.first.b, g.second);
        else
            apply_single(t, g.first.a, g.second);
        check_edge(t, worst_edge);
    }
}

std::vector<PreparedGate> prepare_gates(const std::vector<GateSpec>& gates, int modes, int d) {
    std::vector<PreparedGate> out;
    out.reserve(gates.size());
    for (const GateSpec& g : gates) {
        validate_gate_modes(g, modes);
        out.emplace_back(g, gate_unitary(g, d));
    }
    return out;
}

Tensor product_input(const std::vector<int>& photons, int cutoff) {
    const int m = static_cast<int>(photons.size());
    if (m < 1 || m > max_live_modes) throw usage_error("oracle supports one to three live modes");
    Tensor t{m, cutoff, std::vector<cxd>(static_cast<size_t>(ipow(cutoff, m)), cxd(0.0, 0.0))};
    long idx = 0;
    for (int k = 0; k < m; ++k) {
        if (photons[k] < 0 || photons[k] >= cutoff)
            throw usage_error("input photon number must lie below the cutoff");
        idx += photons[k] * t.stride(k);
    }
    t.amp[static_cast<size_t>(idx)] = cxd(1.0, 0.0);
    return t;
}

// append |n> as the new last mode
Tensor attach_ancilla(const Tensor& t, int n) {
    if (n < 0 || n >= t.d) throw usage_error("ancilla photon number must lie below the cutoff");
    if (t.modes + 1 > max_live_modes) throw usage_error("oracle supports one to three live modes");
    Tensor out{t.modes + 1, t.d, std::vector<cxd>(static_cast<size_t>(t.total()) * t.d, cxd(0.0, 0.0))};
    for (long idx = 0; idx < t.total(); ++idx) out.amp[idx * t.d + n] = t.amp[idx];
    return out;
}

// <g_{sigma,y}| u_m scaled so that contracting a state with these weights
// approximates psi(y) + O(sigma^2): (2 sigma sqrt(pi))^{-1} times the
// integral of exp(-(x-y)^2 / 4 sigma^2) u_m(x).
std::vector<double> homodyne_bra(int d, double sigma, double y) {
    const int n = 4001;
    const double lo = y - 12.0 * sigma;
    const double dx = 24.0 * sigma / (n - 1);
    std::vector<double> c(static_cast<size_t>(d), 0.0);
    for (int i = 0; i < n; ++i) {
        const double x = lo + i * dx;
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        const double kern = std::exp(-(x - y) * (x - y) / (4.0 * sigma * sigma));
        const std::vector<double> u = hermite_u_all(d - 1, x);
        for (int m = 0; m < d; ++m) c[m] += w * kern * u[m];
    }
    const double scale = dx / 3.0 / (2.0 * sigma * std::sqrt(pi));
    for (double& v : c) v *= scale;
    return c;
}

Tensor contract_mode(const Tensor& t, int k, const std::vector<double>& bra) {
    const long s = t.stride(k);
    Tensor out{t.modes - 1, t.d, std::vector<cxd>(static_cast<size_t>(t.total() / t.d), cxd(0.0, 0.0))};
    for (long o = 0; o < out.total(); ++o) {
        const long hi = o / s, lo = o % s;
        cxd acc(0.0, 0.0);
        for (int n = 0; n < t.d; ++n) acc += bra[n] * t.amp[hi * t.d * s + n * s + lo];
        out.amp[o] = acc;
    }
    return out;
}

struct PreparedStage {
    std::vector<PreparedGate> gates;
    int ancilla_photons = 0;
    double outcome = 0.0;
    int measure_mode = 0;  // resolved index after the attach
    std::vector<PreparedGate> feedforward;
};

std::vector<PreparedStage> prepare_stages(const OracleCircuit& circuit, int input_modes, int d) {
    std::vector<PreparedStage> out;
    int m = input_modes;
    for (const OracleStage& st : circuit.stages) {
        const int m_att = m + 1;
        if (m_att > max_live_modes) throw usage_error("oracle supports one to three live modes");
        PreparedStage p;
        p.gates = prepare_gates(st.gates, m_att, d);
        p.ancilla_photons = st.ancilla_photons;
        p.outcome = st.outcome;
        p.measure_mode = st.measure_mode < 0 ? m_att - 1 : st.measure_mode;
        if (p.measure_mode >= m_att) throw usage_error("measured mode index out of range");
        p.feedforward = prepare_gates(st.feedforward, m_att - 1, d);
        out.push_back(std::move(p));
        m = m_att - 1;
    }
    return out;
}

Tensor run_pass(const Tensor& input, const std::vector<PreparedStage>& stages, double sigma,
                double& worst_edge) {
    Tensor t = input;
    check_edge(t, worst_edge);
    for (const PreparedStage& st : stages) {
        t = attach_ancilla(t, st.ancilla_photons);
        check_edge(t, worst_edge);
        apply_gates(t, st.gates, worst_edge);
        const std::vector<double> bra = homodyne_bra(t.d, sigma, st.outcome);
        t = contract_mode(t, st.measure_mode, bra);
        apply_gates(t, st.feedforward, worst_edge);
    }
    return t;
}

FockOracleState to_state(Tensor t, double worst_edge) {
    FockOracleState s;
    s.modes = t.modes;
    s.cutoff = t.d;
    s.amplitudes = std::move(t.amp);
    s.edge_population = worst_edge;
    return s;
}

Tensor to_tensor(const FockOracleState& s) {
    return Tensor{s.modes, s.cutoff, s.amplitudes};
}

// <t| op on mode k |t>
cxd expect(const Tensor& t, const std::vector<std::pair<int, const Eigen::MatrixXcd*>>& ops) {
    Tensor w = t;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) apply_single(w, it->first, *it->second);
    cxd acc(0.0, 0.0);
    for (long i = 0; i < t.total(); ++i) acc += std::conj(t.amp[i]) * w.amp[i];
    return acc;
}

}  // namespace

double FockOracleState::norm2() const {
    double s = 0.0;
    for (const cxd& v : amplitudes) s += std::norm(v);
    return s;
}

void FockOracleState::normalize() {
    const double n2 = norm2();
    if (!(n2 > 1e-300)) throw numeric_error("oracle state has vanishing norm");
    const double inv = 1.0 / std::sqrt(n2);
    for (cxd& v : amplitudes) v *= inv;
}

cxd FockOracleState::overlap_with(const FockOracleState& other) const {
    if (modes != other.modes || cutoff != other.cutoff)
        throw usage_error("oracle states must share mode count and cutoff");
    cxd acc(0.0, 0.0);
    for (size_t i = 0; i < amplitudes.size(); ++i)
        acc += std::conj(amplitudes[i]) * other.amplitudes[i];
    return acc;
}

WavefunctionGrid FockOracleState::wavefunction(const RealGrid& grid) const {
    if (modes != 1) throw usage_error("grid projection needs a one-mode state");
    WavefunctionGrid out;
    out.g = RealGrid::make(grid.x_min, grid.x_max, grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const std::vector<double> u = hermite_u_all(cutoff - 1, out.g.x(i));
        cxd v(0.0, 0.0);
        for (int n = 0; n < cutoff; ++n) v += amplitudes[static_cast<size_t>(n)] * u[n];
        out.g.v[static_cast<size_t>(i)] = v;
    }
    return out;
}

Eigen::VectorXd FockOracleState::quadrature_mean() const {
    FockOracleState s = *this;
    s.normalize();
    const Tensor t = to_tensor(s);
    const Eigen::MatrixXcd a = lowering(cutoff), ad = a.adjoint();
    const Eigen::MatrixXcd X = (a + ad) / std::sqrt(2.0);
    const Eigen::MatrixXcd P = cxd(0.0, -1.0) * (a - ad) / std::sqrt(2.0);
    Eigen::VectorXd mu(2 * modes);
    for (int k = 0; k < modes; ++k) {
        mu(k) = expect(t, {{k, &X}}).real();
        mu(modes + k) = expect(t, {{k, &P}}).real();
    }
    return mu;
}

Eigen::MatrixXd FockOracleState::quadrature_covariance() const {
    FockOracleState s = *this;
    s.normalize();
    const Tensor t = to_tensor(s);
    const Eigen::MatrixXcd a = lowering(cutoff), ad = a.adjoint();
    const Eigen::MatrixXcd X = (a + ad) / std::sqrt(2.0);
    const Eigen::MatrixXcd P = cxd(0.0, -1.0) * (a - ad) / std::sqrt(2.0);
    const auto op = [&](int i) -> std::pair<int, const Eigen::MatrixXcd*> {
        return i < modes ? std::make_pair(i, &X) : std::make_pair(i - modes, &P);
    };
    Eigen::VectorXd mu(2 * modes);
    for (int i = 0; i < 2 * modes; ++i) mu(i) = expect(t, {op(i)}).real();
    Eigen::MatrixXd cov(2 * modes, 2 * modes);
    for (int i = 0; i < 2 * modes; ++i)
        for (int j = i; j < 2 * modes; ++j) {
            const cxd m_ij = expect(t, {op(i), op(j)});
            const cxd m_ji = expect(t, {op(j), op(i)});
            const double sym = 0.5 * (m_ij + m_ji).real();
            cov(i, j) = cov(j, i) = sym - mu(i) * mu(j);
        }
    return cov;
}

FockOracleState fock_oracle_apply(const std::vector<GateSpec>& gates,
                                  const std::vector<int>& input_photons, int cutoff) {
    validate_cutoff(cutoff);
    Tensor t = product_input(input_photons, cutoff);
    double worst_edge = 0.0;
    check_edge(t, worst_edge);
    apply_gates(t, prepare_gates(gates, t.modes, cutoff), worst_edge);
    return to_state(std::move(t), worst_edge);
}

FockOracleState fock_oracle_run(const OracleCircuit& circuit,
                                const std::vector<int>& input_photons, int cutoff) {
    validate_cutoff(cutoff);
    const Tensor input = product_input(input_photons, cutoff);
    const std::vector<PreparedStage> stages =
        prepare_stages(circuit, static_cast<int>(input_photons.size()), cutoff);
    double worst_edge = 0.0;
    const Tensor f1 = run_pass(input, stages, 0.1, worst_edge);
    const Tensor f2 = run_pass(input, stages, 0.05, worst_edge);
    const Tensor f3 = run_pass(input, stages, 0.025, worst_edge);
    // two Richardson steps in sigma^2 (widths halve, so the ratio is 4)
    Tensor out = f3;
    for (long i = 0; i < out.total(); ++i) {
        const cxd r1 = (4.0 * f2.amp[i] - f1.amp[i]) / 3.0;
        const cxd r2 = (4.0 * f3.amp[i] - f2.amp[i]) / 3.0;
        out.amp[i] = (16.0 * r2 - r1) / 15.0;
    }
    return to_state(std::move(out), worst_edge);
}

StagedCircuit to_staged_circuit(const OracleCircuit& circuit, int input_modes) {
    if (input_modes < 1) throw usage_error("need at least one input mode");
    StagedCircuit sc;
    int m = input_modes;
    for (const OracleStage& st : circuit.stages) {
        const int m_att = m + 1;
        CircuitStage cs;
        cs.op = compose_gates(st.gates, m_att);
        cs.ancilla_photons = st.ancilla_photons;
        cs.outcome = st.outcome;
        cs.measure_mode = st.measure_mode;
        if (!st.feedforward.empty()) {
            const std::vector<GateSpec> ff = st.feedforward;
            const int m_after = m_att - 1;
            cs.feedforward = [ff, m_after](double) { return compose_gates(ff, m_after); };
        }
        sc.stages.push_back(std::move(cs));
        m = m_att - 1;
    }
    return sc;
}

}  // namespace gkpsim
