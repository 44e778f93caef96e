#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "ising1d/chain_model.hpp"

namespace ising1d {

/// Unnormalized weights of s = +1 (index 0) and s = -1 (index 1) after
/// summing out every site on one side, kept in log form. After each step the
/// larger log-weight is 0 and the removed normalization accumulates in
/// log_scale.
struct MessageState {
    std::array<double, 2> log_weights{0.0, 0.0};
    double log_scale = 0.0;

    /// Half the log-ratio of the two weights: the effective field the
    /// summed-out sites exert on the receiving site.
    [[nodiscard]] double field() const noexcept {
        return 0.5 * (log_weights[0] - log_weights[1]);
    }
};

/// Signed quantity stored as sign * exp(log_abs); sign 0 means exactly zero.
struct SignedLog {
    int sign = 0;
    double log_abs = -std::numeric_limits<double>::infinity();

    [[nodiscard]] double value() const noexcept {
        return sign == 0 ? 0.0 : sign * std::exp(log_abs);
    }
};

/// Passes a message across edge (x, x+1): absorbs the field at x and the
/// coupling on the edge.
[[nodiscard]] MessageState propagate(const MessageState& in, double field, double coupling);

/// Forward/backward transfer-matrix sweep over a chain. Construction is
/// O(N); queries reuse the stored messages. Works for signed couplings and
/// fields of any magnitude the exponent range allows (|J|, |h| up to ~1e300
/// in principle; tested to 1e3).
class TransferSolver {
public:
    explicit TransferSolver(ChainParams params);

    [[nodiscard]] const ChainParams& params() const noexcept { return params_; }

    [[nodiscard]] double log_partition() const noexcept { return log_z_; }

    /// Message into x from sites 0..x-1 (excluding the field at x).
    [[nodiscard]] const MessageState& forward(Site x) const { return forward_.at(x); }
    /// Message into x from sites x+1..N (excluding the field at x).
    [[nodiscard]] const MessageState& backward(Site x) const { return backward_.at(x); }

    /// Total field on x once both sides are summed out; <s_x> = tanh of it.
    [[nodiscard]] double local_field(Site x) const;
    /// h_x plus the effective field of sites x+1..N.
    [[nodiscard]] double right_field(Site x) const;
    /// h_x plus the effective field of sites 0..x-1.
    [[nodiscard]] double left_field(Site x) const;

    [[nodiscard]] double site_mean(Site x) const;

    /// <s_i s_j> by constrained propagation from i to j. Requires i < j.
    [[nodiscard]] double pair_expectation(Site i, Site j) const;

    /// cov(s_i, s_j) in sign/log form. Order of i and j does not matter.
    ///
    /// Uses the Markov structure of the chain: E[s_{k+1} | s_k = s] is
    /// tanh(R_{k+1} + J_k s), so E[s_j | s_i] is affine in s_i with slope
    /// prod_k (tanh(R+J) - tanh(R-J))/2, and cov = (1 - <s_i>^2) * slope.
    /// Every factor is a ratio of positive terms, so small covariances keep
    /// full relative precision.
    [[nodiscard]] SignedLog log_covariance(Site i, Site j) const;

    [[nodiscard]] double covariance(Site i, Site j) const { return log_covariance(i, j).value(); }

    /// pair_expectation - site_mean * site_mean. Cross-check only: loses
    /// relative precision when the covariance is small next to the means.
    [[nodiscard]] double covariance_by_difference(Site i, Site j) const;

private:
    ChainParams params_;
    std::vector<MessageState> forward_;
    std::vector<MessageState> backward_;
    double log_z_ = 0.0;
};

// Single-query conveniences; each builds a solver.
[[nodiscard]] double log_partition(const ChainParams& params);
[[nodiscard]] double site_mean(const ChainParams& params, Site x);
[[nodiscard]] double pair_expectation(const ChainParams& params, Site i, Site j);
[[nodiscard]] double covariance(const ChainParams& params, Site i, Site j);

/// -log cov(s_i, s_j) / (j - i) for i < j; empty when the covariance is not
/// strictly positive (rate undefined).
[[nodiscard]] std::optional<double> finite_decay_rate(const ChainParams& params, Site i, Site j);
[[nodiscard]] std::optional<double> finite_decay_rate(const TransferSolver& solver, Site i, Site j);

}  // namespace ising1d
