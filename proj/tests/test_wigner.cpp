#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "gkpsim/error.hpp"
#include "gkpsim/gkp_prep.hpp"
#include "gkpsim/grid.hpp"
#include "gkpsim/numerics.hpp"
#include "gkpsim/wigner.hpp"

using namespace gkpsim;
using std::numbers::pi;

namespace {

WavefunctionGrid fock_state(int n, const RealGrid& grid) {
    WavefunctionGrid out;
    out.g = grid;
    for (int i = 0; i < grid.n; ++i) out.g.v[i] = hermite_u(n, grid.x(i));
    out.normalize();
    return out;
}

// full complex Simpson of the doubled-argument transform at one (x,p),
// summing all y samples with per-sample phase factors (no symmetry shortcut,
// no rotating phasor)
cxd wigner_direct(const WavefunctionGrid& psi, double x, double p) {
    const RealGrid& g = psi.g;
    double dy = g.dx();
    int c = static_cast<int>(std::llround((x - g.x_min) / dy));
    REQUIRE(std::abs(g.x(c) - x) < 1e-9);
    int half = std::min(c, g.n - 1 - c);
    std::vector<cxd> f(2 * half + 1);
    for (int j = -half; j <= half; ++j)
        f[j + half] = std::conj(g.v[c - j]) * g.v[c + j] * std::polar(1.0, -2.0 * p * j * dy);
    return integrate_complex(f, dy);
}

const double airy_zero[4] = {-2.33810741045977, -4.08794944413097, -5.52055982809555,
                             -6.78670809007176};

}  // namespace

TEST_CASE("vacuum transform is the positive Gaussian") {
    RealGrid grid = RealGrid::make(-10.0, 10.0, 1025);
    WavefunctionGrid vac = fock_state(0, grid);
    RealGrid x_axis = RealGrid::make(-2.5, 2.5, 129);
    RealGrid p_axis = RealGrid::make(-3.0, 3.0, 121);
    WignerGrid w = wigner_pure(vac, x_axis, p_axis);
    CHECK(w.convention == WignerConvention::integral_pi);

    double min_v = 1e300;
    for (int ix = 0; ix < x_axis.n; ++ix)
        for (int ip = 0; ip < p_axis.n; ++ip) {
            double x = x_axis.x(ix), p = p_axis.x(ip);
            CHECK(std::abs(w.at(ix, ip) - std::exp(-x * x - p * p)) <= 1e-6);
            min_v = std::min(min_v, w.at(ix, ip));
        }
    CHECK(min_v >= -1e-12);

    // total integral pi under this convention, 1 after conversion
    RealGrid wx = RealGrid::make(-5.0, 5.0, 257);
    RealGrid wp = RealGrid::make(-5.0, 5.0, 257);
    WignerGrid wide = wigner_pure(vac, wx, wp);
    CHECK(std::abs(wide.integral() - pi) <= 1e-4 * pi);
    WignerGrid unit = wide.to_unit();
    CHECK(unit.convention == WignerConvention::unit);
    CHECK(std::abs(unit.integral() - 1.0) <= 1e-4);
    CHECK_THROWS_AS(unit.to_unit(), usage_error);

    // momentum marginal recovers pi |psi(x)|^2
    for (int ix : {128, 144, 96}) {
        std::vector<double> row(wp.n);
        for (int ip = 0; ip < wp.n; ++ip) row[ip] = wide.at(ix, ip);
        double marg = integrate_real(row, wp.dx()) / pi;
        double x = wx.x(ix);
        CHECK(std::abs(marg - std::exp(-x * x) / std::sqrt(pi)) <= 1e-4);
    }

    NegativityProfile prof = negativity_profile(w, {.axis = 'x', .value = 0.0});
    CHECK(prof.sign_changes == 0);
    CHECK(prof.min_value >= -1e-12);
    CHECK(std::abs(prof.negative_integral) <= 1e-12);
}

TEST_CASE("one-photon transform is negative at the origin") {
    RealGrid grid = RealGrid::make(-10.0, 10.0, 1025);
    WavefunctionGrid one = fock_state(1, grid);
    RealGrid x_axis = RealGrid::make(-2.5, 2.5, 129);
    RealGrid p_axis = RealGrid::make(-3.0, 3.0, 121);
    WignerGrid w = wigner_pure(one, x_axis, p_axis);

    CHECK(w.at(64, 60) == doctest::Approx(-1.0).epsilon(1e-6));
    for (int ix = 0; ix < x_axis.n; ix += 4)
        for (int ip = 0; ip < p_axis.n; ip += 4) {
            double x = x_axis.x(ix), p = p_axis.x(ip);
            double want = (2.0 * (x * x + p * p) - 1.0) * std::exp(-x * x - p * p);
            CHECK(std::abs(w.at(ix, ip) - want) <= 1e-5);
        }

    NegativityProfile prof = negativity_profile(w, {.axis = 'x', .value = 0.0});
    CHECK(prof.min_value < -0.9);
    CHECK(prof.sign_changes == 2);
    REQUIRE(prof.crossings.size() == 2);
    CHECK(std::abs(prof.crossings[0] + std::sqrt(0.5)) <= 1e-3);
    CHECK(std::abs(prof.crossings[1] - std::sqrt(0.5)) <= 1e-3);
    CHECK(prof.negative_integral < -0.1);
    CHECK(prof.argmin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("transform matches a direct complex quadrature") {
    WavefunctionGrid psi = gkp_exact_state({.n2 = 5, .r = 1.0, .p0 = 1.0},
                                           RealGrid::make(-20.0, 20.0, 4097));
    RealGrid x_axis = RealGrid::make(-2.05078125, 0.9765625, 311);  // on psi nodes
    RealGrid p_axis = RealGrid::make(-2.3, 0.7, 31);
    WignerGrid w = wigner_pure(psi, x_axis, p_axis);

    for (int ix : {0, 210, 310})
        for (int ip : {0, 23, 30}) {
            double x = x_axis.x(ix), p = p_axis.x(ip);
            cxd direct = wigner_direct(psi, x, p);
            CAPTURE(x);
            CAPTURE(p);
            CHECK(std::abs(direct.imag()) <= 1e-10);
            CHECK(std::abs(direct.real() - w.at(ix, ip)) <= 1e-12 * (1.0 + std::abs(direct)));
        }
}

TEST_CASE("parity covariance") {
    RealGrid grid = RealGrid::make(-20.0, 20.0, 4097);
    WavefunctionGrid psi = gkp_exact_state({.n2 = 5, .r = 1.0, .p0 = 1.0}, grid);
    WavefunctionGrid mirrored;
    mirrored.g = grid;
    for (int i = 0; i < grid.n; ++i) mirrored.g.v[i] = psi.g.v[grid.n - 1 - i];
    mirrored.normalized = psi.normalized;

    RealGrid x_axis = RealGrid::make(-0.3125, 0.3125, 65);
    RealGrid p_axis = RealGrid::make(-2.0, 2.0, 41);
    WignerGrid w = wigner_pure(psi, x_axis, p_axis);
    WignerGrid wm = wigner_pure(mirrored, x_axis, p_axis);

    double vmax = 0.0;
    for (double v : w.values) vmax = std::max(vmax, std::abs(v));
    for (int ix = 0; ix < x_axis.n; ++ix)
        for (int ip = 0; ip < p_axis.n; ++ip)
            CHECK(std::abs(wm.at(ix, ip) - w.at(x_axis.n - 1 - ix, p_axis.n - 1 - ip)) <=
                  1e-12 * vmax);
}

TEST_CASE("ideal cubic closed form") {
    CHECK_THROWS_AS(wigner_ideal_cubic(0.0, RealGrid::make(-1, 1, 3), RealGrid::make(-1, 1, 3)),
                    usage_error);

    double gamma = 0.05;
    RealGrid x_axis = RealGrid::make(-2.0, 2.0, 5);
    RealGrid p_axis = RealGrid::make(-2.0, 6.0, 801);
    WignerGrid w = wigner_ideal_cubic(gamma, x_axis, p_axis);
    double scale = std::cbrt(4.0 / (3.0 * gamma));

    // the ridge p = 3 gamma x^2 carries the constant value pi scale Ai(0)
    double ridge = pi * scale * 0.3550280538878172;
    CHECK(w.at(2, 200) == doctest::Approx(ridge).epsilon(1e-10));   // (x, p) = (0, 0)
    CHECK(w.at(1, 215) == doctest::Approx(ridge).epsilon(1e-10));   // (-1, 0.15)
    CHECK(w.at(3, 215) == doctest::Approx(ridge).epsilon(1e-10));   // (1, 0.15)
    CHECK(w.at(0, 260) == doctest::Approx(ridge).epsilon(1e-10));   // (-2, 0.6)
    CHECK(w.at(4, 260) == doctest::Approx(ridge).epsilon(1e-10));   // (2, 0.6)

    // off-ridge wiring
    CHECK(w.at(3, 400) ==
          doctest::Approx(pi * scale * airy_ai(scale * (3.0 * gamma - 2.0))).epsilon(1e-12));

    // oscillation along x = 0: crossings at the mapped Airy zeros
    NegativityProfile prof = negativity_profile(w, {.axis = 'x', .value = 0.0});
    CHECK(prof.sign_changes >= 3);
    REQUIRE(prof.crossings.size() >= 4);
    for (int k = 0; k < 4; ++k) {
        double want = -airy_zero[k] * std::cbrt(3.0 * gamma / 4.0);
        CHECK(std::abs(prof.crossings[k] - want) <= 2e-3);
    }
    CHECK(prof.min_value < 0.0);
    CHECK(prof.negative_integral < 0.0);

    // along p = 0 the argument never goes negative: no oscillation
    NegativityProfile flat = negativity_profile(w, {.axis = 'p', .value = 0.0});
    CHECK(flat.sign_changes == 0);
    CHECK(flat.min_value >= 0.0);
}

TEST_CASE("windowed surrogate matches the closed form") {
    // the grid must resolve the chirp of the surrogate everywhere inside the
    // window: pi/dx above the peak local frequency 6 gamma (y^2 + x^2) + 2|p|
    // ~ 1093, otherwise the quadrature's weight-pattern harmonic at pi/dx
    // acquires a stationary point and aliases an O(1) artifact into the map
    double gamma = 0.05;
    WavefunctionGrid surrogate =
        cubic_phase_window(gamma, 60.0, RealGrid::make(-64.0, 64.0, 57601));
    RealGrid x_axis = RealGrid::make(-4.0, 4.0, 101);
    RealGrid p_axis = RealGrid::make(-4.0, 4.0, 101);
    WignerGrid wp = wigner_pure(surrogate, x_axis, p_axis);
    WignerGrid wi = wigner_ideal_cubic(gamma, x_axis, p_axis);

    double s = wp.at(50, 50) / wi.at(50, 50);  // calibration at the (0,0) ridge point
    CHECK(s > 0.0);
    double ref = 0.0;
    for (double v : wi.values) ref = std::max(ref, std::abs(s * v));
    double sup = 0.0;
    for (size_t i = 0; i < wp.values.size(); ++i)
        sup = std::max(sup, std::abs(wp.values[i] - s * wi.values[i]));
    CHECK(sup <= 1e-2 * ref);
}

TEST_CASE("mixtures are linear and convention-checked") {
    RealGrid grid = RealGrid::make(-10.0, 10.0, 1025);
    RealGrid x_axis = RealGrid::make(-2.5, 2.5, 129);
    RealGrid p_axis = RealGrid::make(-3.0, 3.0, 121);
    WavefunctionGrid u0 = fock_state(0, grid), u1 = fock_state(1, grid);
    WignerGrid w0 = wigner_pure(u0, x_axis, p_axis);
    WignerGrid w1 = wigner_pure(u1, x_axis, p_axis);

    DetectionEnsemble even;
    even.members = {{0.5, u0}, {0.5, u1}};
    WignerGrid mixed = wigner_mixed(even, x_axis, p_axis);
    CHECK(std::abs(mixed.at(64, 60)) <= 1e-6);  // +1 and -1 average out at the origin

    DetectionEnsemble single;
    single.members = {{1.0, u1}};
    WignerGrid lone = wigner_mixed(single, x_axis, p_axis);
    for (size_t i = 0; i < lone.values.size(); ++i)
        CHECK(std::abs(lone.values[i] - w1.values[i]) <= 1e-15);

    DetectionEnsemble tilted;
    tilted.members = {{0.3, u0}, {0.7, u1}};
    WignerGrid got = wigner_mixed(tilted, x_axis, p_axis);
    WignerGrid manual = w0;
    for (double& v : manual.values) v *= 0.3;
    add_scaled(manual, 0.7, w1);
    for (size_t i = 0; i < got.values.size(); ++i)
        CHECK(std::abs(got.values[i] - manual.values[i]) <= 1e-15);

    WignerGrid unit = w0.to_unit();
    CHECK_THROWS_AS(add_scaled(unit, 1.0, w1), usage_error);
    WignerGrid other = wigner_pure(u0, x_axis, RealGrid::make(-3.0, 3.0, 61));
    CHECK_THROWS_AS(add_scaled(other, 1.0, w1), usage_error);
    CHECK_THROWS_AS(wigner_mixed(DetectionEnsemble{}, x_axis, p_axis), usage_error);
}

TEST_CASE("alignment and support validation") {
    RealGrid grid = RealGrid::make(-20.0, 20.0, 4097);
    WavefunctionGrid psi = gkp_exact_state({.n2 = 2, .r = 0.8, .p0 = 1.0}, grid);
    RealGrid p_axis = RealGrid::make(-2.0, 2.0, 21);

    CHECK_THROWS_AS(wigner_pure(psi, RealGrid::make(-21.0, 0.0, 3), p_axis), support_error);
    CHECK_THROWS_AS(wigner_pure(psi, RealGrid::make(0.001, 0.101, 3), p_axis), usage_error);

    WavefunctionGrid denorm = psi;
    for (auto& v : denorm.g.v) v *= 2.0;
    CHECK_THROWS_AS(wigner_pure(denorm, RealGrid::make(-0.3125, 0.3125, 65), p_axis), usage_error);

    WignerGrid w = wigner_pure(psi, RealGrid::make(-0.3125, 0.3125, 65), p_axis);
    CHECK_THROWS_AS(negativity_profile(w, {.axis = 'x', .value = 0.0123}), usage_error);
    CHECK_THROWS_AS(negativity_profile(w, {.axis = 'x', .value = 5.0}), support_error);
    CHECK_THROWS_AS(negativity_profile(w, {.axis = 'q', .value = 0.0}), usage_error);
    CHECK_NOTHROW(negativity_profile(w, {.axis = 'p', .value = 0.0}));
}
