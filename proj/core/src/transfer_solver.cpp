#include "ising1d/transfer_solver.hpp"

#include <algorithm>
#include <numbers>
#include <string>

#include "ising1d/errors.hpp"
#include "numerics.hpp"

namespace ising1d {

namespace {

using detail::kNegInf;
using detail::log_add_exp;
using detail::log_cosh;

constexpr std::array<double, 2> kSpin{1.0, -1.0};

void require_site(const ChainParams& params, Site x) {
    if (x >= params.n_sites()) {
        throw UsageError("site " + std::to_string(x) + " out of range for chain with " +
                         std::to_string(params.n_sites()) + " sites");
    }
}

// Shift so the larger log-weight is 0; both -inf cannot happen for finite
// parameters.
void renormalize(std::array<double, 2>& lw, double& log_scale) {
    const double m = std::max(lw[0], lw[1]);
    lw[0] -= m;
    lw[1] -= m;
    log_scale += m;
}

// One transfer step without renormalization: out[s'] = lse_s(in[s] + h s + J s s').
std::array<double, 2> step(const std::array<double, 2>& in, double field, double coupling) {
    std::array<double, 2> out{};
    for (std::size_t t = 0; t < 2; ++t) {
        double acc = kNegInf;
        for (std::size_t s = 0; s < 2; ++s) {
            if (in[s] == kNegInf) continue;
            acc = log_add_exp(acc, in[s] + field * kSpin[s] + coupling * kSpin[s] * kSpin[t]);
        }
        out[t] = acc;
    }
    return out;
}

}  // namespace

MessageState propagate(const MessageState& in, double field, double coupling) {
    MessageState out{step(in.log_weights, field, coupling), in.log_scale};
    renormalize(out.log_weights, out.log_scale);
    return out;
}

TransferSolver::TransferSolver(ChainParams params)
    : params_(std::move(params)), forward_(params_.n_sites()), backward_(params_.n_sites()) {
    const auto J = params_.couplings();
    const auto h = params_.fields();
    const std::size_t n = params_.n_sites();
    for (std::size_t x = 0; x + 1 < n; ++x) {
        forward_[x + 1] = propagate(forward_[x], h[x], J[x]);
    }
    for (std::size_t x = n - 1; x > 0; --x) {
        backward_[x - 1] = propagate(backward_[x], h[x], J[x - 1]);
    }
    const auto& last = forward_[n - 1];
    log_z_ = last.log_scale +
             log_add_exp(last.log_weights[0] + h[n - 1], last.log_weights[1] - h[n - 1]);
}

double TransferSolver::local_field(Site x) const {
    require_site(params_, x);
    return params_.field(x) + forward_[x].field() + backward_[x].field();
}

double TransferSolver::right_field(Site x) const {
    require_site(params_, x);
    return params_.field(x) + backward_[x].field();
}

double TransferSolver::left_field(Site x) const {
    require_site(params_, x);
    return params_.field(x) + forward_[x].field();
}

double TransferSolver::site_mean(Site x) const { return std::tanh(local_field(x)); }

double TransferSolver::pair_expectation(Site i, Site j) const {
    require_site(params_, i);
    require_site(params_, j);
    if (i >= j) throw UsageError("pair_expectation requires i < j");
    const auto J = params_.couplings();
    const auto h = params_.fields();

    // log P(s_i, s_j) for the four spin pairs, built by pinning s_i and
    // propagating the pinned message to j.
    std::array<std::array<double, 2>, 2> log_joint{};
    for (std::size_t si = 0; si < 2; ++si) {
        std::array<double, 2> lw{kNegInf, kNegInf};
        lw[si] = forward_[i].log_weights[si];
        double scale = forward_[i].log_scale;
        for (std::size_t x = i; x < j; ++x) {
            lw = step(lw, h[x], J[x]);
            renormalize(lw, scale);
        }
        for (std::size_t sj = 0; sj < 2; ++sj) {
            log_joint[si][sj] = scale + lw[sj] + h[j] * kSpin[sj] + backward_[j].log_weights[sj] +
                                backward_[j].log_scale - log_z_;
        }
    }
    double same = std::exp(log_joint[0][0]) + std::exp(log_joint[1][1]);
    double diff = std::exp(log_joint[0][1]) + std::exp(log_joint[1][0]);
    return same - diff;
}

SignedLog TransferSolver::log_covariance(Site i, Site j) const {
    require_site(params_, i);
    require_site(params_, j);
    if (i == j) throw UsageError("covariance requires distinct sites");
    if (i > j) std::swap(i, j);
    const auto J = params_.couplings();

    SignedLog out{1, -2.0 * log_cosh(local_field(i))};
    for (std::size_t k = i; k < j; ++k) {
        const double coupling = J[k];
        if (coupling == 0.0) return SignedLog{};
        if (coupling < 0.0) out.sign = -out.sign;
        const double r = right_field(k + 1);
        const double a = std::fabs(coupling);
        // (tanh(r+a) - tanh(r-a)) / 2 = sinh(2a) / (2 cosh(r+a) cosh(r-a))
        out.log_abs += detail::log_sinh(2.0 * a) - std::numbers::ln2 - log_cosh(r + a) -
                       log_cosh(r - a);
    }
    return out;
}

double TransferSolver::covariance_by_difference(Site i, Site j) const {
    if (i > j) std::swap(i, j);
    return pair_expectation(i, j) - site_mean(i) * site_mean(j);
}

double log_partition(const ChainParams& params) { return TransferSolver(params).log_partition(); }

double site_mean(const ChainParams& params, Site x) { return TransferSolver(params).site_mean(x); }

double pair_expectation(const ChainParams& params, Site i, Site j) {
    return TransferSolver(params).pair_expectation(i, j);
}

double covariance(const ChainParams& params, Site i, Site j) {
    return TransferSolver(params).covariance(i, j);
}

std::optional<double> finite_decay_rate(const TransferSolver& solver, Site i, Site j) {
    if (i >= j) throw UsageError("finite_decay_rate requires i < j");
    const SignedLog c = solver.log_covariance(i, j);
    if (c.sign <= 0) return std::nullopt;
    return -c.log_abs / static_cast<double>(j - i);
}

std::optional<double> finite_decay_rate(const ChainParams& params, Site i, Site j) {
    return finite_decay_rate(TransferSolver(params), i, j);
}

}  // namespace ising1d
