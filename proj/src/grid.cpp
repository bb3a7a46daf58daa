#include "gkpsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gkpsim {

RealGrid RealGrid::make(double x_min, double x_max, int n) {
    if (!(x_max > x_min)) throw usage_error("grid: x_max must exceed x_min");
    if (n < 2) throw usage_error("grid: need at least 2 points");
    RealGrid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.n = n;
    g.v.assign(n, cxd(0.0, 0.0));
    return g;
}

int RealGrid::nearest_index(double x0) const {
    int i = static_cast<int>(std::lround((x0 - x_min) / dx()));
    return std::clamp(i, 0, n - 1);
}

namespace {

template <class T>
T simpson(const std::vector<T>& f, double dx, int i0, int i1) {
    int m = i1 - i0;
    if (m < 2 || m % 2 != 0)
        throw usage_error("integrate: composite Simpson needs an odd point count (even panel count)");
    T acc = f[i0] + f[i1];
    for (int i = i0 + 1; i < i1; i += 2) acc += 4.0 * f[i];
    for (int i = i0 + 2; i < i1; i += 2) acc += 2.0 * f[i];
    return acc * (dx / 3.0);
}

}  // namespace

cxd integrate(const RealGrid& g) {
    if (g.n % 2 == 0) throw usage_error("integrate: grid point count must be odd");
    return simpson(g.v, g.dx(), 0, g.n - 1);
}

double integrate_real(const std::vector<double>& f, double dx) {
    if (f.size() % 2 == 0) throw usage_error("integrate: point count must be odd");
    return simpson(f, dx, 0, static_cast<int>(f.size()) - 1);
}

cxd integrate_complex(const std::vector<cxd>& f, double dx) {
    if (f.size() % 2 == 0) throw usage_error("integrate: point count must be odd");
    return simpson(f, dx, 0, static_cast<int>(f.size()) - 1);
}

cxd integrate_complex_range(const std::vector<cxd>& f, double dx, int i0, int i1) {
    return simpson(f, dx, i0, i1);
}

double WavefunctionGrid::norm2() const {
    return integrate_real(density(), g.dx());
}

std::vector<double> WavefunctionGrid::density() const {
    std::vector<double> d(g.n);
    for (int i = 0; i < g.n; ++i) d[i] = std::norm(g.v[i]);
    return d;
}

void WavefunctionGrid::normalize() {
    double n2 = norm2();
    if (!(n2 > 0.0)) throw numeric_error("normalize: state has zero norm");
    double s = 1.0 / std::sqrt(n2);
    for (auto& z : g.v) z *= s;
    normalized = true;
}

void WavefunctionGrid::align_global_phase() {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < g.n; ++i) {
        double a = std::abs(g.v[i]);
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    cxd rot = std::conj(g.v[imax]) / best;
    for (auto& z : g.v) z *= rot;
}

bool WavefunctionGrid::edge_decay_ok(double tol) const {
    double mx = 0.0;
    for (const auto& z : g.v) mx = std::max(mx, std::abs(z));
    if (mx == 0.0) return false;
    return std::abs(g.v.front()) < tol * mx && std::abs(g.v.back()) < tol * mx;
}

double rel_l2_distance_phase_aligned(const WavefunctionGrid& a, const WavefunctionGrid& b) {
    if (a.g.n != b.g.n || a.g.x_min != b.g.x_min || a.g.x_max != b.g.x_max)
        throw usage_error("rel_l2_distance: grids must match");
    // optimal phase rotates <a|b> onto the positive real axis; the residual
    // is integrated directly (the norm identity n_a + n_b - 2|ov| cancels
    // catastrophically below ~1e-8)
    cxd ov = overlap(a, b);
    cxd rot = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : cxd(1.0, 0.0);
    std::vector<double> res2(a.g.n);
    for (int i = 0; i < a.g.n; ++i) res2[i] = std::norm(a.g.v[i] - rot * b.g.v[i]);
    double d2 = integrate_real(res2, a.g.dx());
    return std::sqrt(d2 / a.norm2());
}

cxd overlap(const WavefunctionGrid& a, const WavefunctionGrid& b) {
    if (a.g.n != b.g.n || a.g.x_min != b.g.x_min || a.g.x_max != b.g.x_max)
        throw usage_error("overlap: grids must match");
    std::vector<cxd> f(a.g.n);
    for (int i = 0; i < a.g.n; ++i) f[i] = std::conj(a.g.v[i]) * b.g.v[i];
    return integrate_complex(f, a.g.dx());
}

std::vector<cxd> resample_shifted(const WavefunctionGrid& psi, double q) {
    const RealGrid& g = psi.g;
    double steps = q / g.dx();
    double rounded = std::round(steps);
    std::vector<cxd> out(g.n, cxd(0.0, 0.0));
    if (std::abs(steps - rounded) < 1e-12 * std::max(1.0, std::abs(steps))) {
        int k = static_cast<int>(rounded);
        for (int i = 0; i < g.n; ++i) {
            int j = i + k;
            if (j >= 0 && j < g.n) out[i] = g.v[j];
        }
        return out;
    }
    // Whittaker-Shannon interpolation at x_i + q
    for (int i = 0; i < g.n; ++i) {
        double t = i + steps;  // fractional source index
        cxd acc(0.0, 0.0);
        for (int j = 0; j < g.n; ++j) {
            double u = std::numbers::pi * (t - j);
            double w = std::abs(u) < 1e-12 ? 1.0 : std::sin(u) / u;
            acc += w * g.v[j];
        }
        out[i] = acc;
    }
    return out;
}

void require_shift_support(const WavefunctionGrid& psi, double q, double tol) {
    const RealGrid& g = psi.g;
    double mx = 0.0;
    for (const auto& z : g.v) mx = std::max(mx, std::abs(z));
    if (mx == 0.0) return;
    // shifting reads past one grid edge; zero-fill there is only accurate if
    // psi has decayed at that edge
    int k = static_cast<int>(std::ceil(std::abs(q) / g.dx()));
    if (k <= 0) return;
    if (k >= g.n) throw support_error("shift exceeds grid extent");
    double worst = 0.0;
    if (q > 0) {
        for (int i = g.n - k; i < g.n; ++i) worst = std::max(worst, std::abs(g.v[i]));
    } else {
        for (int i = 0; i < k; ++i) worst = std::max(worst, std::abs(g.v[i]));
    }
    if (worst > tol * mx)
        throw support_error("shift pushes non-negligible samples off the grid");
}

}  // namespace gkpsim
