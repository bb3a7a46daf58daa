#pragma once

#include <cmath>
#include <complex>

namespace gkpsim {

// Complex scalar in log form: value = exp(log_mag) * exp(i*phase).
// Keeps products of many tiny/huge factors (binomial tails, Gaussian
// prefactors) representable where the linear value would under/overflow.
struct LogComplex {
    double log_mag = 0.0;   // natural log of |value|
    double phase = 0.0;     // radians
    bool zero = false;

    static LogComplex zero_value() { return {0.0, 0.0, true}; }

    static LogComplex from(std::complex<double> v) {
        if (v == std::complex<double>(0.0, 0.0)) return zero_value();
        return {std::log(std::abs(v)), std::arg(v), false};
    }

    static LogComplex from_log(double lm, double ph) { return {lm, ph, false}; }

    std::complex<double> value() const {
        if (zero) return {0.0, 0.0};
        return std::polar(std::exp(log_mag), phase);
    }

    LogComplex operator*(const LogComplex& o) const {
        if (zero || o.zero) return zero_value();
        return {log_mag + o.log_mag, phase + o.phase, false};
    }
    LogComplex& operator*=(const LogComplex& o) { return *this = *this * o; }

    LogComplex operator/(const LogComplex& o) const {
        if (zero) return zero_value();
        return {log_mag - o.log_mag, phase - o.phase, false};
    }

    LogComplex pow_int(int k) const {
        if (zero) return k == 0 ? LogComplex{} : zero_value();
        return {log_mag * k, phase * k, false};
    }
};

}  // namespace gkpsim
