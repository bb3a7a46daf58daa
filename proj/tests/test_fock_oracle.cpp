#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "gkpsim/error.hpp"
#include "gkpsim/fock_circuit.hpp"
#include "gkpsim/fock_oracle.hpp"
#include "gkpsim/gaussian.hpp"
#include "gkpsim/grid.hpp"
#include "gkpsim/numerics.hpp"

using namespace gkpsim;

namespace {

using Kind = GateSpec::Kind;

GateSpec g1(Kind k, int a, double p1, double p2 = 0.0) {
    GateSpec g;
    g.kind = k;
    g.a = a;
    g.p1 = p1;
    g.p2 = p2;
    return g;
}

GateSpec g2(Kind k, int a, int b, double p1 = 0.0, double p2 = 0.0) {
    GateSpec g;
    g.kind = k;
    g.a = a;
    g.b = b;
    g.p1 = p1;
    g.p2 = p2;
    return g;
}

cxd amp_at(const FockOracleState& s, const std::vector<int>& levels) {
    long idx = 0;
    for (int k = 0; k < s.modes; ++k) {
        long stride = 1;
        for (int j = k + 1; j < s.modes; ++j) stride *= s.cutoff;
        idx += levels[static_cast<size_t>(k)] * stride;
    }
    return s.amplitudes[static_cast<size_t>(idx)];
}

// |<a|b>| for normalized copies of two one-mode states on a shared grid
double grid_overlap(WavefunctionGrid a, WavefunctionGrid b) {
    a.normalize();
    b.normalize();
    return std::abs(overlap(a, b));
}

}  // namespace

TEST_CASE("gate unitaries reproduce closed-form actions") {
    // coherent amplitudes from a displacement of vacuum
    const cxd alpha(0.4, 0.2);
    const FockOracleState coh =
        fock_oracle_apply({g1(Kind::displace, 0, alpha.real(), alpha.imag())}, {0}, 25);
    double fact = 1.0;
    for (int n = 0; n < 12; ++n) {
        if (n > 0) fact *= n;
        const cxd want = std::exp(-0.5 * std::norm(alpha)) * std::pow(alpha, n) / std::sqrt(fact);
        CHECK(std::abs(amp_at(coh, {n}) - want) <= 1e-12);
    }
    CHECK(coh.norm2() == doctest::Approx(1.0).epsilon(1e-12));

    // phase gate is diagonal: |3> picks up e^{-3 i theta}
    const FockOracleState rot = fock_oracle_apply({g1(Kind::phase, 0, 0.9)}, {3}, 10);
    CHECK(std::abs(amp_at(rot, {3}) - std::polar(1.0, -2.7)) <= 1e-14);

    // squeezed vacuum: amp_{2m} = (-tanh r)^m sqrt((2m)!)/(2^m m!)/sqrt(cosh r)
    const double r = 0.3;
    const FockOracleState sq = fock_oracle_apply({g1(Kind::squeeze, 0, r)}, {0}, 30);
    for (int m = 0; m <= 4; ++m) {
        const double want = std::pow(-std::tanh(r), m) *
                            std::exp(0.5 * log_factorial(2 * m) - log_factorial(m) -
                                     m * std::log(2.0)) /
                            std::sqrt(std::cosh(r));
        CHECK(std::abs(amp_at(sq, {2 * m}) - want) <= 1e-10);
        if (m >= 1) CHECK(std::abs(amp_at(sq, {2 * m - 1})) <= 1e-14);
    }

    // beamsplit rotates a single photon between modes
    const double th = 0.7, ph = 0.3;
    const FockOracleState bs = fock_oracle_apply({g2(Kind::beamsplit, 0, 1, th, ph)}, {1, 0}, 8);
    CHECK(std::abs(amp_at(bs, {1, 0}) - cxd(std::cos(th), 0.0)) <= 1e-12);
    CHECK(std::abs(amp_at(bs, {0, 1}) - std::polar(std::sin(th), ph)) <= 1e-12);
    CHECK(std::abs(amp_at(bs, {1, 1})) <= 1e-13);

    // squeeze and displace conventions agree with the quadrature pipeline
    const RealGrid grid = RealGrid::make(-9.0, 9.0, 1201);
    GaussianState ref = GaussianState::vacuum(1);
    apply_symplectic(ref, compose_gates({g1(Kind::squeeze, 0, -0.45)}, 1));
    CHECK(grid_overlap(fock_oracle_apply({g1(Kind::squeeze, 0, -0.45)}, {0}, 25).wavefunction(grid),
                       ref.wavefunction(grid)) >= 1.0 - 1e-10);
    GaussianState refd = GaussianState::vacuum(1);
    apply_symplectic(refd, compose_gates({g1(Kind::displace, 0, 0.5, -0.3)}, 1));
    CHECK(grid_overlap(
              fock_oracle_apply({g1(Kind::displace, 0, 0.5, -0.3)}, {0}, 25).wavefunction(grid),
              refd.wavefunction(grid)) >= 1.0 - 1e-10);
}

TEST_CASE("identity circuits leave number states alone") {
    const FockOracleState s = fock_oracle_apply({}, {0, 3}, 25);
    CHECK(std::abs(amp_at(s, {0, 3}) - cxd(1.0, 0.0)) == 0.0);
    CHECK(s.norm2() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.edge_population <= 1e-12);
}

TEST_CASE("two-mode squeezing writes the thermal amplitude law") {
    const double r = 0.3;
    const FockOracleState s =
        fock_oracle_apply({g2(Kind::two_mode_squeeze, 0, 1, r)}, {0, 0}, 25);
    for (int n = 0; n <= 10; ++n) {
        const double want = std::pow(std::tanh(r), n) / std::cosh(r);
        CHECK(std::abs(amp_at(s, {n, n}) - want) <= 1e-6);
    }
    CHECK(std::abs(amp_at(s, {1, 2})) <= 1e-12);
    CHECK(std::abs(amp_at(s, {0, 3})) <= 1e-12);

    // covariance agrees with the symplectic action on vacuum
    GaussianState ref = GaussianState::vacuum(2);
    apply_symplectic(ref, gate_symplectic(g2(Kind::two_mode_squeeze, 0, 1, r), 2));
    CHECK((s.quadrature_covariance() - ref.covariance()).cwiseAbs().maxCoeff() <= 1e-6);

    // the library's closed-form state is the same squeezer at z = -2r
    const GaussianState lib = two_mode_squeezed(r);
    const FockOracleState neg =
        fock_oracle_apply({g2(Kind::two_mode_squeeze, 0, 1, -r)}, {0, 0}, 25);
    CHECK((neg.quadrature_covariance() - lib.covariance()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("adder moments match the covariance algebra") {
    const std::vector<GateSpec> gates = {g1(Kind::squeeze, 0, -0.4), g2(Kind::sum, 0, 1),
                                         g1(Kind::displace, 1, 0.3, 0.1)};
    const FockOracleState s = fock_oracle_apply(gates, {0, 0}, 30);
    GaussianState ref = GaussianState::vacuum(2);
    apply_symplectic(ref, compose_gates(gates, 2));
    CHECK((s.quadrature_mean() - ref.mean()).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK((s.quadrature_covariance() - ref.covariance()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("homodyne bras reproduce pointwise values") {
    // measure the input mode against outcome y; the untouched vacuum ancilla
    // remains, scaled by u_n(y)
    for (const int n : {0, 1, 5}) {
        for (const double y : {0.3, -1.1}) {
            OracleStage st;
            st.measure_mode = 0;
            st.outcome = y;
            OracleCircuit oc{{st}};
            const FockOracleState out = fock_oracle_run(oc, {n}, 20);
            const double tol = n == 0 ? 1e-7 : 1e-5;
            CHECK(std::abs(amp_at(out, {0}) - hermite_u(n, y)) <= tol);
        }
    }
}

TEST_CASE("a beamsplit teleporter matches the exact pipeline") {
    OracleStage st;
    st.gates = {g2(Kind::beamsplit, 0, 1, 0.6, 0.0)};
    st.ancilla_photons = 1;
    st.outcome = 0.3;
    OracleCircuit oc{{st}};
    const FockOracleState oracle = fock_oracle_run(oc, {0}, 24);

    const PolyGaussian exact =
        single_ancilla_output(compose_gates(st.gates, 2), GaussianState::vacuum(1), 1, 0.3);
    const RealGrid grid = RealGrid::make(-9.0, 9.0, 1201);
    CHECK(grid_overlap(oracle.wavefunction(grid), exact.wavefunction(grid)) >= 1.0 - 1e-6);
    CHECK(oracle.edge_population <= 1e-6);
}

TEST_CASE("staged circuits with feedforward match the exact pipeline") {
    OracleStage s1;
    s1.gates = {g1(Kind::squeeze, 0, 0.2), g2(Kind::beamsplit, 0, 1, 0.3, 0.2)};
    s1.ancilla_photons = 1;
    s1.outcome = 0.15;
    s1.feedforward = {g1(Kind::displace, 0, 0.1, -0.05)};
    OracleStage s2;
    s2.gates = {g2(Kind::sum, 0, 1), g1(Kind::phase, 1, 0.4)};
    s2.ancilla_photons = 1;
    s2.outcome = -0.2;
    OracleCircuit oc{{s1, s2}};

    const FockOracleState oracle = fock_oracle_run(oc, {0}, 24);
    const PolyGaussian exact = staged_output(to_staged_circuit(oc, 1), GaussianState::vacuum(1));
    const RealGrid grid = RealGrid::make(-9.0, 9.0, 1201);
    CHECK(grid_overlap(oracle.wavefunction(grid), exact.wavefunction(grid)) >= 1.0 - 1e-6);
    CHECK(exact.degree() <= 2 * 2);
}

TEST_CASE("seeded random circuits agree with the exact pipeline") {
    // fixed seeds 101..104; the acceptance suite runs the 20-seed version
    const RealGrid grid = RealGrid::make(-10.0, 10.0, 1601);
    for (const unsigned seed : {101u, 102u, 103u, 104u}) {
        std::mt19937 rng(seed);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::uniform_int_distribution<int> photons(0, 3);
        std::uniform_int_distribution<int> n_stages(1, 2);
        std::uniform_int_distribution<int> n_gates(1, 3);
        std::uniform_int_distribution<int> kind_pick(0, 4);

        OracleCircuit oc;
        int total_photons = 0;
        const int stages = n_stages(rng);
        for (int l = 0; l < stages; ++l) {
            OracleStage st;
            st.ancilla_photons = photons(rng);
            total_photons += st.ancilla_photons;
            st.outcome = -0.8 + 1.6 * u01(rng);
            const int gates = n_gates(rng);
            for (int k = 0; k < gates; ++k) {
                switch (kind_pick(rng)) {
                    case 0: st.gates.push_back(g1(Kind::squeeze, 0, -0.5 + u01(rng))); break;
                    case 1: st.gates.push_back(g1(Kind::phase, 1, 2.0 * u01(rng))); break;
                    case 2:
                        st.gates.push_back(g2(Kind::beamsplit, 0, 1, 0.6 * u01(rng), u01(rng)));
                        break;
                    case 3: {
                        const int ctrl = u01(rng) < 0.5 ? 0 : 1;
                        st.gates.push_back(g2(Kind::sum, ctrl, 1 - ctrl));
                        break;
                    }
                    default:
                        st.gates.push_back(
                            g1(Kind::displace, 1, -0.4 + 0.8 * u01(rng), -0.4 + 0.8 * u01(rng)));
                }
            }
            oc.stages.push_back(st);
        }

        const FockOracleState oracle = fock_oracle_run(oc, {0}, 24);
        const PolyGaussian exact = staged_output(to_staged_circuit(oc, 1), GaussianState::vacuum(1));
        CHECK(grid_overlap(oracle.wavefunction(grid), exact.wavefunction(grid)) >= 1.0 - 1e-5);
        CHECK(exact.degree() <= 2 * total_photons);
        CHECK(exact.degree() <= total_photons);  // structural bound of the derivative engine
    }
}

TEST_CASE("cutoff exhaustion and bad arguments are rejected") {
    // a displacement with mean photon number ~9 cannot fit below cutoff 6
    CHECK_THROWS_AS((void)fock_oracle_apply({g1(Kind::displace, 0, 3.0, 0.0)}, {0}, 6),
                    numeric_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({}, {7}, 6), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({}, {0, 0, 0, 0}, 6), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({}, {}, 6), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({}, {0}, 1), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({}, {0}, 64), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({g2(Kind::sum, 0, 0)}, {0, 0}, 6), usage_error);
    CHECK_THROWS_AS((void)fock_oracle_apply({g1(Kind::squeeze, 2, 0.1)}, {0, 0}, 6), usage_error);

    OracleStage st;
    st.measure_mode = 5;
    OracleCircuit oc{{st}};
    CHECK_THROWS_AS((void)fock_oracle_run(oc, {0}, 8), usage_error);

    FockOracleState a = fock_oracle_apply({}, {0}, 8);
    FockOracleState b = fock_oracle_apply({}, {0, 0}, 8);
    CHECK_THROWS_AS((void)a.overlap_with(b), usage_error);
    CHECK_THROWS_AS((void)b.wavefunction(RealGrid::make(-1.0, 1.0, 11)), usage_error);
    FockOracleState z = a;
    for (cxd& v : z.amplitudes) v = 0.0;
    CHECK_THROWS_AS(z.normalize(), numeric_error);
}
