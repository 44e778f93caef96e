#include "ising1d/bounds.hpp"

#include <cmath>
#include <numbers>

#include "ising1d/effective_field.hpp"
#include "ising1d/errors.hpp"
#include "ising1d/transfer_solver.hpp"
#include "numerics.hpp"

namespace ising1d {

namespace {

using detail::kNegInf;

void require_pair(const ChainParams& params, Site i, Site j) {
    if (i >= j) throw UsageError("bounds require sites i < j");
    if (j >= params.n_sites()) throw UsageError("site j out of range");
}

void require_ferromagnetic(const ChainParams& params, const char* what) {
    if (!params.has_nonnegative_couplings()) {
        throw PreconditionError(std::string(what) + " requires nonnegative couplings");
    }
}

double log_edge_product(const ChainParams& params, Site i, Site j) {
    double acc = 0.0;
    for (std::size_t x = i; x < j; ++x) acc += detail::log_edge_factor(params.coupling(x));
    return acc;
}

struct WindowFieldMass {
    double signed_mass = 0.0;
    double absolute_mass = 0.0;
};

WindowFieldMass window_field_mass(const ChainParams& params, Site i, Site j) {
    const TruncatedModel t = truncate(params, i, j);
    WindowFieldMass m;
    for (double h : t.params.fields()) {
        m.signed_mass += h;
        m.absolute_mass += std::fabs(h);
    }
    return m;
}

}  // namespace

double log_bound_thm2(const ChainParams& params, Site i, Site j) {
    require_pair(params, i, j);
    require_ferromagnetic(params, "bound_thm2");
    if (!params.has_nonnegative_fields()) {
        throw PreconditionError("bound_thm2 requires nonnegative fields");
    }
    const WindowFieldMass m = window_field_mass(params, i, j);
    return log_edge_product(params, i, j) - 2.0 * detail::log_cosh(m.signed_mass);
}

double bound_thm2(const ChainParams& params, Site i, Site j) {
    return std::exp(log_bound_thm2(params, i, j));
}

double log_bound_thm1(const ChainParams& params, Site i, Site j, EffectiveFieldRoute route) {
    require_pair(params, i, j);
    require_ferromagnetic(params, "bound_thm1");
    WindowFieldMass m;
    if (route == EffectiveFieldRoute::signed_model) {
        m = window_field_mass(params, i, j);
    } else {
        // Effective end fields from (J, |h|); interior fields keep their sign.
        const TruncatedModel t = truncate(params.with_absolute_fields(), i, j);
        m.signed_mass = t.h_prime_i + t.h_prime_j;
        m.absolute_mass = std::fabs(t.h_prime_i) + std::fabs(t.h_prime_j);
        for (Site x = i + 1; x < j; ++x) {
            m.signed_mass += params.field(x);
            m.absolute_mass += std::fabs(params.field(x));
        }
    }
    const double field_factor = 2.0 * std::numbers::ln2 - 2.0 * std::fabs(m.signed_mass) -
                                2.0 * std::log1p(std::exp(-2.0 * m.absolute_mass));
    return log_edge_product(params, i, j) + field_factor;
}

double bound_thm1(const ChainParams& params, Site i, Site j, EffectiveFieldRoute route) {
    return std::exp(log_bound_thm1(params, i, j, route));
}

double bound_implied_rate(const ChainParams& params, Site i, Site j, EffectiveFieldRoute route) {
    return -log_bound_thm1(params, i, j, route) / static_cast<double>(j - i);
}

double bound_lemma3(const ChainParams& params, Site i, Site j) {
    require_pair(params, i, j);
    const TransferSolver signed_solver(params);
    const TransferSolver abs_solver(params.absolute());
    const SignedLog cov_abs = abs_solver.log_covariance(i, j);
    if (cov_abs.sign == 0) return 0.0;
    const double log_ratio = abs_solver.log_partition() - signed_solver.log_partition();
    return cov_abs.sign * std::exp(cov_abs.log_abs + 2.0 * log_ratio);
}

double bound_zero_field(const ChainParams& params, Site i, Site j) {
    require_pair(params, i, j);
    require_ferromagnetic(params, "bound_zero_field");
    double acc = 0.0;
    for (std::size_t x = i; x < j; ++x) acc += detail::log_tanh(params.coupling(x));
    return std::exp(acc);
}

PartitionRatio partition_ratio_lower(const ChainParams& params) {
    require_ferromagnetic(params, "partition_ratio_lower");
    const SignSplit split = split_by_sign(params.fields());
    const double smaller_mass = std::min(split.plus_mass(), split.minus_mass());
    PartitionRatio r;
    r.ratio = std::exp(log_partition(params) - log_partition(params.absolute()));
    r.lower = std::exp(-2.0 * smaller_mass);
    return r;
}

std::vector<std::string> BoundReport::violations() const {
    std::vector<std::string> out;
    auto check = [&](const std::optional<BoundEntry>& e, const char* name) {
        if (e && !(e->slack >= -kDominanceTolerance)) out.emplace_back(name);
    };
    check(thm1, "thm1");
    check(thm2, "thm2");
    check(lemma3, "lemma3");
    check(zero_field, "zero_field");
    return out;
}

BoundReport compare(const ChainParams& params, Site i, Site j, const CompareOptions& options) {
    require_pair(params, i, j);
    BoundReport r;
    r.i = i;
    r.j = j;
    r.exact_cov = TransferSolver(params).covariance(i, j);
    if (options.enum_cap > 0 && params.n_sites() <= std::min(options.enum_cap, kEnumerationCap)) {
        r.exact_cov_enum = covariance_enum(params, i, j);
    }
    auto entry = [&](double value, double reference) { return BoundEntry{value, value - reference}; };

    const bool ferro = params.has_nonnegative_couplings();
    r.lemma3 = entry(bound_lemma3(params, i, j), std::fabs(r.exact_cov));
    if (ferro) {
        r.thm1 = entry(bound_thm1(params, i, j, options.route), r.exact_cov);
        r.zero_field = entry(bound_zero_field(params, i, j), r.exact_cov);
        if (params.has_nonnegative_fields()) {
            r.thm2 = entry(bound_thm2(params, i, j), r.exact_cov);
        }
    }
    return r;
}

}  // namespace ising1d
