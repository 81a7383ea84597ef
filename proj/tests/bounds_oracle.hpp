#pragma once

// High-precision re-evaluation of the closed-form bounds (50 decimal digits),
// written directly from the formulas and kept independent of the library
// implementation it cross-checks.

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

struct BigInputs {
    Big n, d, logF, c, S, S_star, L, K, K1, K2, W, J, eps_tilde, eps, delta, a;
};

inline Big big_max(const Big& a, const Big& b) { return a > b ? a : b; }

inline Big rademacher_basic(const BigInputs& in) {
    const Big t1 = 1 / sqrt(in.n);
    const Big t2 = (sqrt(in.c) / in.S) * in.logF / (in.n * sqrt(in.d));
    return in.K1 * big_max(t1, t2);
}

inline Big rademacher_refined(const BigInputs& in) {
    const Big t1 = 1 / sqrt(in.n);
    const Big t2 = (sqrt(in.c) / in.S) * sqrt(in.logF / (in.n * in.d));
    const Big t3 = 2 * exp(-in.d * in.S * in.S / (8 * in.c));
    return in.K2 * big_max(t1, big_max(t2, t3));
}

inline Big threshold_finite(const BigInputs& in) {
    const Big t1 = (3 * in.K / in.eps) * sqrt(in.c * in.logF / (in.n * in.d));
    const Big ratio = 6 * in.K / in.eps;
    const Big t2 = ratio > 1 ? sqrt((8 * in.c / in.d) * log(ratio)) : Big(0);
    return big_max(t1, t2);
}

inline Big rademacher_infinite(const BigInputs& in) {
    const Big t1 = sqrt(Big(1) / in.n);
    const Big cover = log(1 + 60 * in.W * in.J / in.eps_tilde);
    const Big t2 = (in.L / in.S_star) * sqrt(in.logF / (in.n * in.d)) * sqrt(in.c * cover);
    const Big t3 = 2 * exp(-in.d * in.S_star * in.S_star / (8 * in.c * in.L * in.L));
    const Big t4 = (in.J / in.S_star) * in.eps_tilde;
    return in.K * big_max(big_max(t1, t2), big_max(t3, t4));
}

inline Big threshold_infinite(const BigInputs& in) {
    const Big cover = log(1 + 60 * in.W * in.J / in.eps_tilde);
    const Big t1 = (3 * in.K / in.eps) * sqrt(in.logF / (in.n * in.d)) * sqrt(in.c * cover);
    const Big ratio = 6 * in.K / in.eps;
    const Big t2 = ratio > 1 ? sqrt((8 * in.c / in.d) * log(ratio)) : Big(0);
    return big_max(t1, t2);
}

inline Big generalization_gap(const Big& rademacher, const Big& a, const Big& delta,
                              const Big& n, const Big& contraction) {
    return 2 * contraction * rademacher + a * sqrt(2 * log(2 / delta) / n);
}

inline Big standard_bound(const BigInputs& in) {
    return in.K2 * (sqrt(Big(1) / in.n) + sqrt(in.logF / in.n));
}

}  // namespace oracle
