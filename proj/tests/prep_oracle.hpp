#pragma once

// Brute-force oracle for the conditional prepared state: for every output
// point x1 it Simpson-integrates
//     e^{i p0 x2} exp(-1/2 [cosh(2r)(x1^2+x2^2) + 2 sinh(2r) x1 x2]) u_{n2}(x2)
// over x2 directly.  Completely independent of the closed-form coefficient
// expansion in the library: the only shared ingredient is the Hermite
// eigenfunction evaluation, which has its own symbolic-differentiation oracle.
//
// The integration window is chosen from a conservative concave envelope
// bound (Gaussian factor times the at-least-Gaussian tail of u_n beyond its
// turning points) so that the discarded tail is below e^-46 of the in-window
// peak.  Inner samples advance by a two-term multiplicative recurrence (one
// complex exponential per row); row_naive() recomputes a row with plain
// exponentials so tests can pin the recurrence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "gkpsim/error.hpp"
#include "gkpsim/grid.hpp"
#include "gkpsim/numerics.hpp"

namespace prep_oracle {

using gkpsim::cxd;

struct OracleRow {
    int k_lo = 0;          // lattice index of the first sample (x2 = k h)
    double shift = 0.0;    // true integrand = samples * e^{shift}
    std::vector<cxd> samples;
};

class PreparedStateOracle {
  public:
    PreparedStateOracle(int n2, double r, double p0, double h = 0.0025)
        : n2_(n2), p0_(p0), h_(h) {
        c2_ = std::cosh(2.0 * r);
        s2_ = std::sinh(2.0 * r);
        su_ = std::sqrt(2.0 * n2 + 1.0);
        double reach = std::max(su_, (s2_ / c2_) * x1_limit) + 50.0;
        k_min_ = static_cast<int>(std::floor(-reach / h_));
        k_max_ = static_cast<int>(std::ceil(reach / h_));
        u_.resize(k_max_ - k_min_ + 1);
        for (int k = k_min_; k <= k_max_; ++k) u_[k - k_min_] = gkpsim::hermite_u(n2_, k * h_);
    }

    OracleRow row(double x1) const {
        auto [klo, khi] = window(x1);
        const double lre = -s2_ * x1;
        const double mg = gauss_max(x1, klo * h_, khi * h_);
        OracleRow out;
        out.k_lo = klo;
        out.shift = mg - 0.5 * c2_ * x1 * x1;
        out.samples.resize(khi - klo + 1);
        double x2 = klo * h_;
        cxd val = std::polar(std::exp(-0.5 * c2_ * x2 * x2 + lre * x2 - mg), p0_ * x2);
        cxd q = std::polar(std::exp(-c2_ * x2 * h_ - 0.5 * c2_ * h_ * h_ + lre * h_), p0_ * h_);
        const double d = std::exp(-c2_ * h_ * h_);
        for (int k = klo; k <= khi; ++k) {
            out.samples[k - klo] = u_[k - k_min_] * val;
            val *= q;
            q *= d;
        }
        return out;
    }

    OracleRow row_naive(double x1) const {
        auto [klo, khi] = window(x1);
        const double lre = -s2_ * x1;
        const double mg = gauss_max(x1, klo * h_, khi * h_);
        OracleRow out;
        out.k_lo = klo;
        out.shift = mg - 0.5 * c2_ * x1 * x1;
        out.samples.resize(khi - klo + 1);
        for (int k = klo; k <= khi; ++k) {
            double x2 = k * h_;
            out.samples[k - klo] =
                u_[k - k_min_] *
                std::polar(std::exp(-0.5 * c2_ * x2 * x2 + lre * x2 - mg), p0_ * x2);
        }
        return out;
    }

    gkpsim::WavefunctionGrid state(const gkpsim::RealGrid& out_grid) const {
        gkpsim::WavefunctionGrid out;
        out.g = out_grid;
        for (int i = 0; i < out_grid.n; ++i) {
            double x1 = out_grid.x(i);
            if (std::abs(x1) > x1_limit) throw gkpsim::usage_error("oracle output point out of range");
            OracleRow r = row(x1);
            out.g.v[i] = gkpsim::integrate_complex(r.samples, h_) * std::exp(r.shift);
        }
        out.normalize();
        return out;
    }

    double h() const { return h_; }

  private:
    static constexpr double x1_limit = 25.0;

    // log-envelope of |integrand| up to x1-independent constants
    double log_env(double x2, double lre) const {
        double le = -0.5 * c2_ * x2 * x2 + lre * x2;
        double a = std::abs(x2);
        if (a > su_) le -= 0.5 * (a - su_) * (a - su_);
        return le;
    }

    double gauss_max(double x1, double lo, double hi) const {
        double mu = std::clamp(-s2_ * x1 / c2_, lo, hi);
        return -0.5 * c2_ * mu * mu - s2_ * x1 * mu;
    }

    std::pair<int, int> window(double x1) const {
        const double lre = -s2_ * x1;
        const double step = 0.05;
        double lo_scan = std::min(-su_, lre / c2_) - 45.0;
        double hi_scan = std::max(su_, lre / c2_) + 45.0;
        int ns = static_cast<int>((hi_scan - lo_scan) / step) + 1;
        double best = -HUGE_VAL;
        for (int i = 0; i < ns; ++i) best = std::max(best, log_env(lo_scan + i * step, lre));
        double lo = hi_scan, hi = lo_scan;
        for (int i = 0; i < ns; ++i) {
            double x = lo_scan + i * step;
            if (log_env(x, lre) >= best - 46.0) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        }
        int klo = static_cast<int>(std::floor((lo - 3.0) / h_));
        int khi = static_cast<int>(std::ceil((hi + 3.0) / h_));
        klo = std::max(klo, k_min_);
        khi = std::min(khi, k_max_);
        if ((khi - klo) % 2 != 0) --khi;  // odd sample count for Simpson
        return {klo, khi};
    }

    int n2_;
    double p0_, h_, c2_, s2_, su_;
    int k_min_ = 0, k_max_ = 0;
    std::vector<double> u_;
};

}  // namespace prep_oracle
