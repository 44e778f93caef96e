#include "ising1d/chain_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ising1d/errors.hpp"

namespace ising1d {

namespace {

bool all_finite(std::span<const double> values) {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> abs_copy(std::span<const double> values) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(), [](double v) { return std::fabs(v); });
    return out;
}

void require_enumerable(const ChainParams& params) {
    if (params.n_sites() > kEnumerationCap) {
        throw CapacityError("enumeration limited to " + std::to_string(kEnumerationCap) +
                            " sites, got " + std::to_string(params.n_sites()));
    }
}

void require_site(const ChainParams& params, Site x) {
    if (x >= params.n_sites()) {
        throw UsageError("site " + std::to_string(x) + " out of range for chain with " +
                         std::to_string(params.n_sites()) + " sites");
    }
}

// -H(bits) with bit x set meaning s_x = -1.
double neg_energy(const ChainParams& params, std::uint64_t bits) {
    const auto J = params.couplings();
    const auto h = params.fields();
    double e = 0.0;
    for (std::size_t x = 0; x < J.size(); ++x) {
        const bool differ = ((bits >> x) ^ (bits >> (x + 1))) & 1U;
        e += differ ? -J[x] : J[x];
    }
    for (std::size_t x = 0; x < h.size(); ++x) {
        e += ((bits >> x) & 1U) ? -h[x] : h[x];
    }
    return e;
}

// Weights exp(-H - shift) for every configuration, where shift bounds -H
// from above so no weight overflows.
struct WeightTable {
    std::vector<double> weights;
    double shift = 0.0;
    double total = 0.0;
};

WeightTable weight_table(const ChainParams& params) {
    require_enumerable(params);
    WeightTable t;
    for (double j : params.couplings()) t.shift += std::fabs(j);
    for (double h : params.fields()) t.shift += std::fabs(h);
    const std::uint64_t count = std::uint64_t{1} << params.n_sites();
    t.weights.resize(count);
    for (std::uint64_t bits = 0; bits < count; ++bits) {
        t.weights[bits] = std::exp(neg_energy(params, bits) - t.shift);
        t.total += t.weights[bits];
    }
    return t;
}

inline double spin_of(std::uint64_t bits, Site x) { return ((bits >> x) & 1U) ? -1.0 : 1.0; }

}  // namespace

ChainParams::ChainParams(std::vector<double> couplings, std::vector<double> fields)
    : couplings_(std::move(couplings)), fields_(std::move(fields)) {
    if (fields_.empty()) {
        throw UsageError("a chain needs at least one site");
    }
    if (couplings_.size() + 1 != fields_.size()) {
        throw UsageError("expected " + std::to_string(fields_.size() - 1) + " couplings for " +
                         std::to_string(fields_.size()) + " fields, got " +
                         std::to_string(couplings_.size()));
    }
    if (!all_finite(couplings_) || !all_finite(fields_)) {
        throw UsageError("couplings and fields must be finite");
    }
}

ChainParams ChainParams::uniform(std::size_t n_sites, double coupling, double field) {
    if (n_sites == 0) throw UsageError("a chain needs at least one site");
    return ChainParams(std::vector<double>(n_sites - 1, coupling), std::vector<double>(n_sites, field));
}

bool ChainParams::has_nonnegative_couplings() const noexcept {
    return std::all_of(couplings_.begin(), couplings_.end(), [](double v) { return v >= 0.0; });
}

bool ChainParams::has_nonnegative_fields() const noexcept {
    return std::all_of(fields_.begin(), fields_.end(), [](double v) { return v >= 0.0; });
}

ChainParams ChainParams::absolute() const { return {abs_copy(couplings_), abs_copy(fields_)}; }

ChainParams ChainParams::with_absolute_fields() const { return {couplings_, abs_copy(fields_)}; }

ChainParams ChainParams::reversed() const {
    return {std::vector<double>(couplings_.rbegin(), couplings_.rend()),
            std::vector<double>(fields_.rbegin(), fields_.rend())};
}

ChainParams ChainParams::negated_fields() const {
    std::vector<double> h(fields_.size());
    std::transform(fields_.begin(), fields_.end(), h.begin(), [](double v) { return -v; });
    return {couplings_, std::move(h)};
}

SpinConfig::SpinConfig(std::vector<int> spins) : spins_(std::move(spins)) {
    if (!std::all_of(spins_.begin(), spins_.end(), [](int s) { return s == 1 || s == -1; })) {
        throw UsageError("spins must be +1 or -1");
    }
}

SpinConfig SpinConfig::from_bits(std::uint64_t bits, std::size_t n_sites) {
    std::vector<int> s(n_sites);
    for (std::size_t x = 0; x < n_sites; ++x) s[x] = ((bits >> x) & 1U) ? -1 : 1;
    return SpinConfig(std::move(s));
}

SpinConfig SpinConfig::flipped() const {
    std::vector<int> s(spins_.size());
    std::transform(spins_.begin(), spins_.end(), s.begin(), [](int v) { return -v; });
    return SpinConfig(std::move(s));
}

double SignSplit::plus_mass() const noexcept {
    double m = 0.0;
    for (double v : plus) m += v;
    return m;
}

double SignSplit::minus_mass() const noexcept {
    double m = 0.0;
    for (double v : minus) m += v;
    return m;
}

SignSplit split_by_sign(std::span<const double> fields) {
    SignSplit s;
    s.plus.reserve(fields.size());
    s.minus.reserve(fields.size());
    for (double h : fields) {
        s.plus.push_back(std::max(h, 0.0));
        s.minus.push_back(std::fabs(std::min(h, 0.0)));
    }
    return s;
}

double hamiltonian(const ChainParams& params, const SpinConfig& config) {
    if (config.size() != params.n_sites()) {
        throw UsageError("spin configuration has " + std::to_string(config.size()) +
                         " sites, chain has " + std::to_string(params.n_sites()));
    }
    const auto J = params.couplings();
    const auto h = params.fields();
    double energy = 0.0;
    for (std::size_t x = 0; x < J.size(); ++x) energy -= J[x] * config[x] * config[x + 1];
    for (std::size_t x = 0; x < h.size(); ++x) energy -= h[x] * config[x];
    return energy;
}

double partition_function_enum(const ChainParams& params) {
    const auto t = weight_table(params);
    return t.total * std::exp(t.shift);
}

double expectation_enum(const ChainParams& params, std::span<const Site> sites) {
    std::uint64_t mask = 0;
    for (Site x : sites) {
        require_site(params, x);
        mask ^= std::uint64_t{1} << x;
    }
    const auto t = weight_table(params);
    double acc = 0.0;
    for (std::uint64_t bits = 0; bits < t.weights.size(); ++bits) {
        const bool odd = std::popcount(bits & mask) & 1;
        acc += odd ? -t.weights[bits] : t.weights[bits];
    }
    return acc / t.total;
}

double covariance_enum(const ChainParams& params, Site i, Site j) {
    require_site(params, i);
    require_site(params, j);
    if (i == j) throw UsageError("covariance requires distinct sites");
    const auto t = weight_table(params);
    double mi = 0.0;
    double mj = 0.0;
    for (std::uint64_t bits = 0; bits < t.weights.size(); ++bits) {
        mi += spin_of(bits, i) * t.weights[bits];
        mj += spin_of(bits, j) * t.weights[bits];
    }
    mi /= t.total;
    mj /= t.total;
    double acc = 0.0;
    for (std::uint64_t bits = 0; bits < t.weights.size(); ++bits) {
        acc += (spin_of(bits, i) - mi) * (spin_of(bits, j) - mj) * t.weights[bits];
    }
    return acc / t.total;
}

std::vector<double> gibbs_distribution_enum(const ChainParams& params) {
    auto t = weight_table(params);
    for (double& w : t.weights) w /= t.total;
    return std::move(t.weights);
}

}  // namespace ising1d
