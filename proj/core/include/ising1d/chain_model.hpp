#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ising1d {

using Site = std::size_t;

/// Couplings J[0..N-1] and fields h[0..N] of one heterogeneous chain on the
/// sites {0, ..., N}. Coupling J[x] sits on the edge (x, x+1). Temperature is
/// absorbed into the parameters. Signed entries are allowed; operations that
/// need a ferromagnetic model check for it themselves.
class ChainParams {
public:
    /// Throws UsageError unless couplings.size() + 1 == fields.size() and
    /// every entry is finite.
    ChainParams(std::vector<double> couplings, std::vector<double> fields);

    /// Homogeneous chain with n_sites sites.
    static ChainParams uniform(std::size_t n_sites, double coupling, double field);

    [[nodiscard]] std::size_t n_sites() const noexcept { return fields_.size(); }
    [[nodiscard]] std::size_t n_edges() const noexcept { return couplings_.size(); }
    [[nodiscard]] Site last_site() const noexcept { return fields_.size() - 1; }

    [[nodiscard]] std::span<const double> couplings() const noexcept { return couplings_; }
    [[nodiscard]] std::span<const double> fields() const noexcept { return fields_; }
    [[nodiscard]] double coupling(std::size_t edge) const { return couplings_.at(edge); }
    [[nodiscard]] double field(Site x) const { return fields_.at(x); }

    [[nodiscard]] bool has_nonnegative_couplings() const noexcept;
    [[nodiscard]] bool has_nonnegative_fields() const noexcept;

    /// Entrywise absolute values (|J|, |h|).
    [[nodiscard]] ChainParams absolute() const;
    /// Same couplings, fields replaced by |h|.
    [[nodiscard]] ChainParams with_absolute_fields() const;
    /// Mirror image: site x maps to N - x.
    [[nodiscard]] ChainParams reversed() const;
    /// Global spin flip of the fields, h -> -h.
    [[nodiscard]] ChainParams negated_fields() const;

    friend bool operator==(const ChainParams&, const ChainParams&) = default;

private:
    std::vector<double> couplings_;
    std::vector<double> fields_;
};

/// A +-1 assignment to every site.
class SpinConfig {
public:
    /// Throws UsageError if any entry is not +1 or -1.
    explicit SpinConfig(std::vector<int> spins);

    /// Site x takes +1 when bit x of `bits` is clear, -1 when set.
    static SpinConfig from_bits(std::uint64_t bits, std::size_t n_sites);

    [[nodiscard]] std::size_t size() const noexcept { return spins_.size(); }
    [[nodiscard]] int operator[](Site x) const { return spins_[x]; }
    [[nodiscard]] std::span<const int> spins() const noexcept { return spins_; }
    [[nodiscard]] SpinConfig flipped() const;

    friend bool operator==(const SpinConfig&, const SpinConfig&) = default;

private:
    std::vector<int> spins_;
};

/// h = plus - minus and |h| = plus + minus, both parts entrywise >= 0.
struct SignSplit {
    std::vector<double> plus;
    std::vector<double> minus;

    [[nodiscard]] double plus_mass() const noexcept;
    [[nodiscard]] double minus_mass() const noexcept;
};

[[nodiscard]] SignSplit split_by_sign(std::span<const double> fields);

/// H(sigma) = -sum_x J_x s_x s_{x+1} - sum_x h_x s_x.
[[nodiscard]] double hamiltonian(const ChainParams& params, const SpinConfig& config);

// Brute-force enumeration over all 2^(N+1) configurations. Ground truth for
// small chains; summation order is fixed (configuration index ascending), so
// results are bitwise reproducible.

inline constexpr std::size_t kEnumerationCap = 24;

/// Z = sum over configurations of exp(-H). Throws CapacityError above the cap.
[[nodiscard]] double partition_function_enum(const ChainParams& params);

/// <prod_{x in sites} s_x>. Duplicate sites cancel pairwise (s_x^2 = 1).
[[nodiscard]] double expectation_enum(const ChainParams& params, std::span<const Site> sites);

/// <s_i s_j> - <s_i><s_j>, evaluated as a centered second pass over the
/// configurations. Requires i != j.
[[nodiscard]] double covariance_enum(const ChainParams& params, Site i, Site j);

/// Full Gibbs distribution, indexed like SpinConfig::from_bits.
[[nodiscard]] std::vector<double> gibbs_distribution_enum(const ChainParams& params);

}  // namespace ising1d
