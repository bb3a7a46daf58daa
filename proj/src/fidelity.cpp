#include "gkpsim/fidelity.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "gkpsim/error.hpp"

namespace gkpsim {

namespace {

void require_normalized(const WavefunctionGrid& psi, const char* what) {
    if (std::abs(psi.norm2() - 1.0) > 1e-6)
        throw usage_error(std::string(what) + " must be normalized");
}

int snapped_index(const RealGrid& g, double x) {
    return static_cast<int>(std::llround((x - g.x_min) / g.dx()));
}

// |Int_window e^{-i gamma x^3} psi(x) dx| for a node-aligned window
cxd windowed_overlap(const WavefunctionGrid& psi, double gamma, const DomainWindow& win) {
    const int i0 = snapped_index(psi.g, win.x_min);
    const int i1 = snapped_index(psi.g, win.x_max);
    std::vector<cxd> f(psi.g.v.size());
    for (int i = i0; i <= i1; ++i) {
        const double x = psi.g.x(i);
        f[static_cast<std::size_t>(i)] =
            std::polar(1.0, -gamma * x * x * x) * psi.g.v[static_cast<std::size_t>(i)];
    }
    return integrate_complex_range(f, psi.g.dx(), i0, i1);
}

double finish(double s, double d, FidelityVariant variant) {
    if (variant == FidelityVariant::unit) return std::sqrt(s / d);
    return std::sqrt(s) / d;
}

}  // namespace

DomainWindow snap_to_grid(const DomainWindow& w, const RealGrid& grid) {
    if (!(w.x_min < w.x_max)) throw usage_error("window is empty or reversed");
    const double dx = grid.dx();
    const double tol = 1e-9 * dx;
    if (w.x_min < grid.x_min - tol || w.x_max > grid.x_max + tol)
        throw support_error("window extends beyond the wavefunction grid");
    int i0 = static_cast<int>(std::ceil((w.x_min - grid.x_min) / dx - 1e-9));
    int i1 = static_cast<int>(std::floor((w.x_max - grid.x_min) / dx + 1e-9));
    if (i0 < 0) i0 = 0;
    if (i1 > grid.n - 1) i1 = grid.n - 1;
    if ((i1 - i0) % 2 != 0) --i1;  // quadrature needs an even interval count
    if (i1 - i0 < 2) throw usage_error("window narrower than two grid intervals");
    return {grid.x(i0), grid.x(i1)};
}

DomainWindow support_window(const WavefunctionGrid& psi, double coverage) {
    if (!(coverage > 0.0 && coverage < 1.0))
        throw usage_error("coverage must lie strictly between 0 and 1");
    const std::vector<double> d = psi.density();
    const int n = psi.g.n;
    const double dx = psi.g.dx();
    std::vector<double> cum(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i)
        cum[static_cast<std::size_t>(i)] = cum[static_cast<std::size_t>(i - 1)] +
                                           0.5 * (d[static_cast<std::size_t>(i - 1)] +
                                                  d[static_cast<std::size_t>(i)]) *
                                               dx;
    const double total = cum[static_cast<std::size_t>(n - 1)];
    if (!(total > 0.0)) throw usage_error("state carries no density mass");
    const double tail = 0.5 * (1.0 - coverage) * total;
    int lo = 0;
    while (lo + 1 < n && cum[static_cast<std::size_t>(lo + 1)] <= tail) ++lo;
    int hi = n - 1;
    while (hi - 1 > lo && total - cum[static_cast<std::size_t>(hi - 1)] <= tail) --hi;
    if ((hi - lo) % 2 != 0) {  // widen, never shrink: keep mass >= coverage
        if (hi < n - 1)
            ++hi;
        else
            --lo;
    }
    return {psi.g.x(lo), psi.g.x(hi)};
}

double state_fidelity(const WavefunctionGrid& psi, double gamma, const DomainWindow& window,
                      FidelityVariant variant) {
    require_normalized(psi, "state");
    const DomainWindow win = snap_to_grid(window, psi.g);
    const cxd a = windowed_overlap(psi, gamma, win);
    return finish(std::norm(a), win.length(), variant);
}

double state_fidelity(const DetectionEnsemble& ensemble, double gamma, const DomainWindow& window,
                      FidelityVariant variant) {
    if (ensemble.members.empty()) throw usage_error("detection ensemble is empty");
    const DomainWindow win = snap_to_grid(window, ensemble.members.front().second.g);
    double s = 0.0;
    for (const auto& [weight, member] : ensemble.members) {
        require_normalized(member, "ensemble member");
        s += weight * std::norm(windowed_overlap(member, gamma, win));
    }
    return finish(s, win.length(), variant);
}

double gate_fidelity(const WavefunctionGrid& psi_in, const WavefunctionGrid& ancilla, double q,
                     double gamma) {
    const RealGrid& g = psi_in.g;
    if (g.x_min != ancilla.g.x_min || g.x_max != ancilla.g.x_max || g.n != ancilla.g.n)
        throw usage_error("input and ancilla must share one grid");
    require_normalized(psi_in, "input state");
    require_normalized(ancilla, "ancilla state");
    require_shift_support(ancilla, q);
    const std::vector<cxd> shifted = resample_shifted(ancilla, q);
    const std::vector<double> dens = psi_in.density();
    std::vector<cxd> f(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        const double xq = g.x(i) + q;
        f[static_cast<std::size_t>(i)] = dens[static_cast<std::size_t>(i)] *
                                         std::polar(1.0, -gamma * xq * xq * xq) *
                                         shifted[static_cast<std::size_t>(i)];
    }
    return std::abs(integrate_complex(f, g.dx()));
}

ScanResult min_gate_fidelity_scan(const WavefunctionGrid& ancilla, double gamma, double q,
                                  const std::vector<WavefunctionGrid>& family) {
    if (family.empty()) throw usage_error("input family is empty");
    ScanResult out;
    out.min_value = gate_fidelity(family.front(), ancilla, q, gamma);
    out.argmin = 0;
    for (std::size_t k = 1; k < family.size(); ++k) {
        const double f = gate_fidelity(family[k], ancilla, q, gamma);
        if (f < out.min_value) {
            out.min_value = f;
            out.argmin = k;
        }
    }
    return out;
}

std::vector<WavefunctionGrid> gaussian_input_family(const RealGrid& grid,
                                                    const std::vector<double>& squeezes,
                                                    const std::vector<double>& centers) {
    std::vector<WavefunctionGrid> family;
    family.reserve(squeezes.size() * centers.size());
    for (double r : squeezes) {
        const double w = std::exp(2.0 * r);
        for (double a : centers) {
            WavefunctionGrid psi;
            psi.g = RealGrid::make(grid.x_min, grid.x_max, grid.n);
            for (int i = 0; i < grid.n; ++i) {
                const double u = grid.x(i) - a;
                psi.g.v[static_cast<std::size_t>(i)] = std::exp(-0.5 * w * u * u);
            }
            psi.normalize();
            family.push_back(std::move(psi));
        }
    }
    return family;
}

}  // namespace gkpsim
