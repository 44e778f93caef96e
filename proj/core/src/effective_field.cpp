#include "ising1d/effective_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ising1d/errors.hpp"
#include "numerics.hpp"

namespace ising1d {

namespace {

// b = artanh(tanh J tanh h). For small products the artanh form is exact to
// rounding; once the product nears 1 it loses digits and the exponential form
//   sign * (m + 1/2 log1p(e^{-2(a+b)}) - 1/2 log1p(e^{-2|a-b|})),  m = min(a, b),
// takes over (there m > 0.5, so nothing cancels).
double field_shift(double coupling, double outer_field) {
    const double a = std::fabs(coupling);
    const double b = std::fabs(outer_field);
    const double sign = (coupling < 0.0) != (outer_field < 0.0) ? -1.0 : 1.0;
    const double product = std::tanh(a) * std::tanh(b);
    if (product < 0.5) return sign * std::atanh(product);
    const double m = std::min(a, b);
    return sign * (m + 0.5 * std::log1p(std::exp(-2.0 * (a + b))) -
                   0.5 * std::log1p(std::exp(-2.0 * std::fabs(a - b))));
}

}  // namespace

SiteRemoval remove_end_site(double coupling, double outer_field) {
    SiteRemoval r;
    r.b_shift = field_shift(coupling, outer_field);
    r.a_const = std::numbers::ln2 + 0.5 * (detail::log_cosh(coupling + outer_field) +
                                           detail::log_cosh(coupling - outer_field));
    return r;
}

TruncatedModel truncate(const ChainParams& params, Site i, Site j, RemovalOrder order) {
    if (i >= j) throw UsageError("truncate requires i < j");
    if (j >= params.n_sites()) {
        throw UsageError("window end " + std::to_string(j) + " out of range");
    }
    const auto J = params.couplings();
    std::vector<double> h(params.fields().begin(), params.fields().end());

    auto strip_right = [&] {
        for (Site x = params.last_site(); x > j; --x) {
            h[x - 1] += remove_end_site(J[x - 1], h[x]).b_shift;
        }
    };
    auto strip_left = [&] {
        for (Site x = 0; x < i; ++x) {
            h[x + 1] += remove_end_site(J[x], h[x]).b_shift;
        }
    };
    if (order == RemovalOrder::right_first) {
        strip_right();
        strip_left();
    } else {
        strip_left();
        strip_right();
    }

    TruncatedModel t{
        {i, j},
        ChainParams(std::vector<double>(J.begin() + static_cast<std::ptrdiff_t>(i),
                                        J.begin() + static_cast<std::ptrdiff_t>(j)),
                    std::vector<double>(h.begin() + static_cast<std::ptrdiff_t>(i),
                                        h.begin() + static_cast<std::ptrdiff_t>(j) + 1)),
        h[i],
        h[j],
    };
    return t;
}

}  // namespace ising1d
