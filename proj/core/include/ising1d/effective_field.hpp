#pragma once

#include <utility>

#include "ising1d/chain_model.hpp"

namespace ising1d {

/// Result of summing out one end site s_out attached by coupling J to its
/// neighbour s:  log sum_{s_out} exp(J s s_out + h_out s_out) = a_const + b_shift * s.
/// |b_shift| <= |J| always.
struct SiteRemoval {
    double a_const = 0.0;
    double b_shift = 0.0;
};

/// Closed form: b = 1/2 log(cosh(J+h)/cosh(J-h)) = artanh(tanh J tanh h),
/// a = 1/2 log(4 cosh(J+h) cosh(J-h)). Each is evaluated in whichever form is
/// well conditioned for the given magnitudes.
[[nodiscard]] SiteRemoval remove_end_site(double coupling, double outer_field);

/// A window [i, j] of a chain with the exterior summed out. Its Gibbs
/// measure equals the marginal of the full model on (s_i, ..., s_j).
struct TruncatedModel {
    std::pair<Site, Site> window;
    ChainParams params;  // j - i + 1 sites, couplings J_i..J_{j-1}
    double h_prime_i = 0.0;
    double h_prime_j = 0.0;
};

enum class RemovalOrder { right_first, left_first };

/// Sums out sites N, N-1, ..., j+1 and 0, 1, ..., i-1 one at a time. The
/// two sides never interact, so the order only matters for testing that
/// claim. Requires i < j <= N.
[[nodiscard]] TruncatedModel truncate(const ChainParams& params, Site i, Site j,
                                      RemovalOrder order = RemovalOrder::right_first);

}  // namespace ising1d
