#include "gkpsim/gkp_prep.hpp"

#include <cmath>
#include <vector>

#include "gkpsim/error.hpp"
#include "gkpsim/log_complex.hpp"
#include "gkpsim/numerics.hpp"

namespace gkpsim {

namespace {

void require_window(const RealGrid& grid, double reach) {
    if (grid.x_max < reach || grid.x_min > -reach)
        throw support_error("grid does not contain the state support (need +-" +
                            std::to_string(reach) + ")");
}

}  // namespace

void PrepParams::validate() const {
    if (n2 < 0) throw usage_error("photon count must be nonnegative");
    if (r < 0.0) throw usage_error("squeezing parameter must be nonnegative");
    if (!(eta >= 0.0 && eta <= 1.0)) throw usage_error("detector efficiency must lie in [0,1]");
    if (!std::isfinite(p0)) throw usage_error("momentum displacement must be finite");
}

double gkp_gamma(int n2) {
    if (n2 < 0) throw usage_error("photon count must be nonnegative");
    return 1.0 / (6.0 * std::sqrt(2.0 * n2 + 1.0));
}

double gkp_beta(int n2) {
    if (n2 < 0) throw usage_error("photon count must be nonnegative");
    return 2.0 * std::sqrt(2.0 * n2 + 1.0);
}

WavefunctionGrid gkp_exact_state(const PrepParams& params, const RealGrid& grid) {
    params.validate();
    const int n2 = params.n2;
    require_window(grid, std::sqrt(2.0 * n2 + 1.0) + 5.0);

    // coefficient of orthonormal u_m, in log form:
    //   C(n2,m) (-tanh r)^m (i p0 sech^2 r)^(n2-m) * sqrt(2^m m!)
    const double tr = std::tanh(params.r);
    const double kick = params.p0 / (std::cosh(params.r) * std::cosh(params.r));
    std::vector<LogComplex> coef(n2 + 1);
    double max_log = -HUGE_VAL;
    for (int m = 0; m <= n2; ++m) {
        LogComplex c =
            LogComplex::from_log(log_binomial(n2, m) +
                                     0.5 * (m * std::log(2.0) + log_factorial(m)),
                                 0.0) *
            LogComplex::from(cxd(-tr, 0.0)).pow_int(m) *
            LogComplex::from(cxd(0.0, kick)).pow_int(n2 - m);
        coef[m] = c;
        if (!c.zero) max_log = std::max(max_log, c.log_mag);
    }
    if (max_log == -HUGE_VAL)
        throw numeric_error("zero-probability outcome: every term of the state vanishes");

    WavefunctionGrid out;
    out.g = grid;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        std::vector<double> u = hermite_u_all(n2, x);
        cxd s(0.0, 0.0);
        for (int m = 0; m <= n2; ++m) {
            if (coef[m].zero) continue;
            s += std::polar(std::exp(coef[m].log_mag - max_log), coef[m].phase) * u[m];
        }
        out.g.v[i] = s * std::polar(1.0, -params.p0 * tr * x);
    }
    out.normalize();
    return out;
}

WavefunctionGrid gkp_approx_state(int n2, const RealGrid& grid) {
    const double g = gkp_gamma(n2), b = gkp_beta(n2);
    WavefunctionGrid out;
    out.g = grid;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        out.g.v[i] = std::polar(1.0, g * x * x * x) + std::polar(1.0, b * x);
    }
    out.normalize();
    return out;
}

WavefunctionGrid displaced_fock_ancilla(int n2, const RealGrid& grid) {
    if (n2 < 0) throw usage_error("photon count must be nonnegative");
    const double s = std::sqrt(2.0 * n2 + 1.0);
    require_window(grid, s + 5.0);
    WavefunctionGrid out;
    out.g = grid;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        out.g.v[i] = std::polar(hermite_u(n2, x), s * x);
    }
    out.normalize();
    return out;
}

double detection_likelihood(int n, int n2, double eta) {
    if (n2 < 0 || n < n2) throw usage_error("need n >= n2 >= 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw usage_error("detector efficiency must lie in [0,1]");
    if (n == n2) return std::pow(eta, n2);  // (1-eta)^0 = 1 even at eta = 1
    if (eta == 0.0) return n2 == 0 ? 1.0 : 0.0;
    return std::exp(log_binomial(n, n2) + n2 * std::log(eta) +
                    (n - n2) * std::log1p(-eta));
}

DetectionEnsemble detector_ensemble(const PrepParams& params, const RealGrid& grid, int n_max) {
    params.validate();
    if (params.eta == 0.0) throw usage_error("detector efficiency zero: outcome carries no information");
    if (n_max < params.n2) throw usage_error("truncation below the measurement outcome");

    DetectionEnsemble out;
    out.n_max = n_max;
    double total = 0.0;
    for (int n = params.n2; n <= n_max; ++n) {
        double w = params.eta * detection_likelihood(n, params.n2, params.eta);
        if (w == 0.0) continue;
        PrepParams pn = params;
        pn.n2 = n;
        out.members.emplace_back(w, gkp_exact_state(pn, grid));
        total += w;
    }
    out.deficit = 1.0 - total;
    return out;
}

}  // namespace gkpsim
