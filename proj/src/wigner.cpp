#include "gkpsim/wigner.hpp"

#include <cmath>
#include <numbers>

#include "gkpsim/error.hpp"
#include "gkpsim/numerics.hpp"
#include "gkpsim/parallel.hpp"

namespace gkpsim {

namespace {

void require_axes_match(const WignerGrid& a, const WignerGrid& b) {
    auto same = [](const RealGrid& u, const RealGrid& v) {
        return u.n == v.n && u.x_min == v.x_min && u.x_max == v.x_max;
    };
    if (!same(a.x_axis, b.x_axis) || !same(a.p_axis, b.p_axis))
        throw usage_error("phase-space grids must share axes");
    if (a.convention != b.convention)
        throw usage_error("phase-space grids must share the normalization convention");
}

// index of the psi grid node under x; throws if x is not a node
int aligned_index(const RealGrid& g, double x, const char* what) {
    double t = (x - g.x_min) / g.dx();
    double r = std::round(t);
    if (std::abs(t - r) > 1e-6)
        throw usage_error(std::string(what) + " must lie on the wavefunction grid nodes");
    int c = static_cast<int>(r);
    if (c < 0 || c >= g.n) throw support_error(std::string(what) + " leaves the wavefunction grid");
    return c;
}

}  // namespace

double WignerGrid::integral() const {
    std::vector<double> rows(x_axis.n);
    std::vector<double> row(p_axis.n);
    for (int ix = 0; ix < x_axis.n; ++ix) {
        for (int ip = 0; ip < p_axis.n; ++ip) row[ip] = at(ix, ip);
        rows[ix] = integrate_real(row, p_axis.dx());
    }
    return integrate_real(rows, x_axis.dx());
}

WignerGrid WignerGrid::to_unit() const {
    if (convention != WignerConvention::integral_pi)
        throw usage_error("already unit-normalized");
    WignerGrid out = *this;
    out.convention = WignerConvention::unit;
    for (double& v : out.values) v /= std::numbers::pi;
    return out;
}

WignerGrid wigner_pure(const WavefunctionGrid& psi, const RealGrid& x_axis,
                       const RealGrid& p_axis) {
    if (std::abs(psi.norm2() - 1.0) > 1e-6)
        throw usage_error("transform requires a normalized state");
    if (x_axis.x_min < psi.g.x_min || x_axis.x_max > psi.g.x_max)
        throw support_error("x axis leaves the wavefunction grid");

    WignerGrid out;
    out.x_axis = x_axis;
    out.p_axis = p_axis;
    out.values.assign(static_cast<size_t>(x_axis.n) * p_axis.n, 0.0);
    const double dy = psi.g.dx();
    const int n = psi.g.n;

    parallel_for(x_axis.n, [&](long ib, long ie) {
        std::vector<cxd> h;
        for (long ix = ib; ix < ie; ++ix) {
            int c = aligned_index(psi.g, x_axis.x(static_cast<int>(ix)), "x axis");
            int half = std::min(c, n - 1 - c);
            // h_j = psi*(x - j dy) psi(x + j dy); the j < 0 samples are the
            // conjugates, so the quadrature is twice the real part plus j = 0
            h.assign(half + 1, cxd(0.0, 0.0));
            for (int j = 0; j <= half; ++j) h[j] = std::conj(psi.g.v[c - j]) * psi.g.v[c + j];
            // composite Simpson weights on 2*half+1 points, indexed by j>=0:
            // endpoint 1, then alternating 4,2 by the parity of half - j
            for (int ip = 0; ip < p_axis.n; ++ip) {
                double p = p_axis.x(ip);
                cxd step = std::polar(1.0, -2.0 * p * dy);
                cxd ph = step;
                double center_w = (half % 2 == 0) ? 2.0 : 4.0;
                if (half == 0) center_w = 1.0;
                double acc = center_w * h[0].real();
                double re = 0.0;
                for (int j = 1; j < half; ++j) {
                    double w = ((half - j) % 2 == 0) ? 2.0 : 4.0;
                    re += w * (h[j] * ph).real();
                    ph *= step;
                }
                if (half >= 1) re += (h[half] * ph).real();
                out.at(static_cast<int>(ix), ip) = (acc + 2.0 * re) * dy / 3.0;
            }
        }
    });
    return out;
}

WignerGrid wigner_ideal_cubic(double gamma, const RealGrid& x_axis, const RealGrid& p_axis,
                              double peak_scale) {
    if (gamma == 0.0) throw usage_error("zero cubic coefficient: the target degenerates to a plane wave");
    const double scale = std::cbrt(std::abs(4.0 / (3.0 * gamma)));
    const double sgn = gamma > 0.0 ? 1.0 : -1.0;
    const double pref = peak_scale * std::numbers::pi * scale;
    WignerGrid out;
    out.x_axis = x_axis;
    out.p_axis = p_axis;
    out.values.assign(static_cast<size_t>(x_axis.n) * p_axis.n, 0.0);
    for (int ix = 0; ix < x_axis.n; ++ix) {
        double x = x_axis.x(ix);
        for (int ip = 0; ip < p_axis.n; ++ip) {
            double arg = scale * sgn * (3.0 * gamma * x * x - p_axis.x(ip));
            out.at(ix, ip) = pref * airy_ai(arg);
        }
    }
    return out;
}

WignerGrid wigner_mixed(const DetectionEnsemble& ensemble, const RealGrid& x_axis,
                        const RealGrid& p_axis) {
    if (ensemble.members.empty()) throw usage_error("empty ensemble");
    WignerGrid out = wigner_pure(ensemble.members[0].second, x_axis, p_axis);
    for (double& v : out.values) v *= ensemble.members[0].first;
    for (size_t k = 1; k < ensemble.members.size(); ++k)
        add_scaled(out, ensemble.members[k].first,
                   wigner_pure(ensemble.members[k].second, x_axis, p_axis));
    return out;
}

void add_scaled(WignerGrid& acc, double weight, const WignerGrid& term) {
    require_axes_match(acc, term);
    for (size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += weight * term.values[i];
}

NegativityProfile negativity_profile(const WignerGrid& w, const SliceSpec& line) {
    NegativityProfile out;
    if (line.axis == 'x') {
        int ix = aligned_index(w.x_axis, line.value, "slice line");
        out.coord.resize(w.p_axis.n);
        out.values.resize(w.p_axis.n);
        for (int ip = 0; ip < w.p_axis.n; ++ip) {
            out.coord[ip] = w.p_axis.x(ip);
            out.values[ip] = w.at(ix, ip);
        }
    } else if (line.axis == 'p') {
        int ip = aligned_index(w.p_axis, line.value, "slice line");
        out.coord.resize(w.x_axis.n);
        out.values.resize(w.x_axis.n);
        for (int ix = 0; ix < w.x_axis.n; ++ix) {
            out.coord[ix] = w.x_axis.x(ix);
            out.values[ix] = w.at(ix, ip);
        }
    } else {
        throw usage_error("slice axis must be 'x' or 'p'");
    }

    int n = static_cast<int>(out.values.size());
    double vmax = 0.0;
    out.min_value = out.values[0];
    out.argmin = out.coord[0];
    for (int i = 0; i < n; ++i) {
        vmax = std::max(vmax, std::abs(out.values[i]));
        if (out.values[i] < out.min_value) {
            out.min_value = out.values[i];
            out.argmin = out.coord[i];
        }
    }
    const double thresh = 1e-9 * vmax;
    for (int i = 0; i + 1 < n; ++i) {
        double a = out.values[i], b = out.values[i + 1];
        if (a * b < 0.0 && std::max(std::abs(a), std::abs(b)) > thresh)
            out.crossings.push_back(out.coord[i] + (out.coord[i + 1] - out.coord[i]) * a / (a - b));
    }
    out.sign_changes = static_cast<int>(out.crossings.size());

    std::vector<double> neg(n);
    for (int i = 0; i < n; ++i) neg[i] = std::min(out.values[i], 0.0);
    double d = (out.coord.back() - out.coord.front()) / (n - 1);
    out.negative_integral = integrate_real(neg, d);
    return out;
}

WavefunctionGrid cubic_phase_window(double gamma, double window, const RealGrid& grid) {
    if (window <= 0.0) throw usage_error("window must be positive");
    if (grid.x_max < window || grid.x_min > -window)
        throw support_error("grid does not contain the window");
    const double flat = 0.9 * window;
    WavefunctionGrid out;
    out.g = grid;
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.x(i);
        double a = std::abs(x);
        double amp = 0.0;
        if (a <= flat)
            amp = 1.0;
        else if (a <= window)
            amp = 0.5 * (1.0 + std::cos(std::numbers::pi * (a - flat) / (window - flat)));
        out.g.v[i] = std::polar(amp, gamma * x * x * x);
    }
    out.normalize();
    return out;
}

}  // namespace gkpsim
