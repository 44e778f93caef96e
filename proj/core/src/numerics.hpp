#pragma once

#include <cmath>
#include <limits>
#include <numbers>

namespace ising1d::detail {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(cosh x) without overflow for any finite x.
inline double log_cosh(double x) {
    const double a = std::fabs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

// log(exp a + exp b); either argument may be -inf.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == kNegInf) return a;
    return a + std::log1p(std::exp(b - a));
}

// log(tanh a) for a >= 0; -inf at a = 0.
inline double log_tanh(double a) {
    if (a == 0.0) return kNegInf;
    return std::log(-std::expm1(-2.0 * a)) - std::log1p(std::exp(-2.0 * a));
}

// log(sinh a) for a >= 0; -inf at a = 0.
inline double log_sinh(double a) {
    if (a == 0.0) return kNegInf;
    return a + std::log(-std::expm1(-2.0 * a)) - std::numbers::ln2;
}

// log(4 tanh a / (1 + tanh a)^2) = log(1 - exp(-4a)) for a >= 0.
inline double log_edge_factor(double a) {
    if (a == 0.0) return kNegInf;
    return std::log(-std::expm1(-4.0 * a));
}

}  // namespace ising1d::detail
