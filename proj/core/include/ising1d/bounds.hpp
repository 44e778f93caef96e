#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ising1d/chain_model.hpp"

namespace ising1d {

/// Present bounds must dominate the exact covariance (|cov| for the
/// signed-to-absolute envelope) up to this absolute tolerance.
inline constexpr double kDominanceTolerance = 1e-12;

/// Which model the signed-field bound takes its effective end fields from.
/// signed_model integrates out the exterior of the original (J, h) chain;
/// absolute_model does it on (J, |h|), which is the substitution made when
/// the bound is derived from the nonnegative-field case.
enum class EffectiveFieldRoute { signed_model, absolute_model };

// All bounds below take i < j and are evaluated as sums of logarithms, so
// windows of length 1e5 and more are fine; log_* variants skip the final
// exponential and stay meaningful after exp() underflows.

/// Nonnegative J and h:
///   prod_x 4 tanh J_x / (1 + tanh J_x)^2  *  1 / cosh^2(h'_i + sum_interior h + h'_j).
[[nodiscard]] double bound_thm2(const ChainParams& params, Site i, Site j);
[[nodiscard]] double log_bound_thm2(const ChainParams& params, Site i, Site j);

/// Nonnegative J, signed h:
///   prod_x 4 tanh J_x / (1 + tanh J_x)^2 * 4 e^{-2|S|} / (1 + e^{-2A})^2
/// with S the signed and A the absolute field mass of the truncated window.
[[nodiscard]] double bound_thm1(const ChainParams& params, Site i, Site j,
                                EffectiveFieldRoute route = EffectiveFieldRoute::signed_model);
[[nodiscard]] double log_bound_thm1(const ChainParams& params, Site i, Site j,
                                    EffectiveFieldRoute route = EffectiveFieldRoute::signed_model);

/// -log(bound_thm1) / (j - i): a lower bound on the finite decay rate.
[[nodiscard]] double bound_implied_rate(const ChainParams& params, Site i, Site j,
                                        EffectiveFieldRoute route = EffectiveFieldRoute::signed_model);

/// Any signs: cov_{|J|,|h|}(s_i, s_j) * (Z_{|J|,|h|} / Z_{J,h})^2.
[[nodiscard]] double bound_lemma3(const ChainParams& params, Site i, Site j);

/// Nonnegative J: prod_x tanh J_x, the zero-field covariance.
[[nodiscard]] double bound_zero_field(const ChainParams& params, Site i, Site j);

struct PartitionRatio {
    double ratio = 1.0;  // Z_{J,h} / Z_{|J|,|h|}
    double lower = 1.0;  // exp(-2 min(sum h+, sum h-))
};

/// Nonnegative J. The lower bound uses whichever sign part has the smaller
/// mass; the global spin flip makes both choices valid.
[[nodiscard]] PartitionRatio partition_ratio_lower(const ChainParams& params);

struct BoundEntry {
    double value = 0.0;
    double slack = 0.0;  // value - cov, or value - |cov| for lemma3
};

struct BoundReport {
    Site i = 0;
    Site j = 0;
    double exact_cov = 0.0;
    std::optional<double> exact_cov_enum;  // cross-check, small chains only
    std::optional<BoundEntry> thm1;
    std::optional<BoundEntry> thm2;
    std::optional<BoundEntry> lemma3;
    std::optional<BoundEntry> zero_field;

    /// Names of present bounds whose slack is below -kDominanceTolerance.
    [[nodiscard]] std::vector<std::string> violations() const;
};

struct CompareOptions {
    EffectiveFieldRoute route = EffectiveFieldRoute::signed_model;
    /// Enumeration cross-check runs when n_sites <= enum_cap (0 disables).
    std::size_t enum_cap = kEnumerationCap;
};

/// Exact covariance (transfer solver) plus every bound whose preconditions
/// hold; the rest are left empty.
[[nodiscard]] BoundReport compare(const ChainParams& params, Site i, Site j,
                                  const CompareOptions& options = {});

}  // namespace ising1d
