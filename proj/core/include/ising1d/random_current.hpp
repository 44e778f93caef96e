#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "ising1d/chain_model.hpp"

namespace ising1d {

// Random currents on the chain extended by a ghost site g that is joined to
// every vertex x by an edge carrying the field h_x. Lattice edges carry rate
// |J_x|, ghost edges rate |h_x|; all counts are independent Poisson.

/// Nonnegative arrivals on lattice edges (x, x+1) and ghost edges (x, g).
struct Current {
    std::vector<std::uint32_t> lattice;  // N entries
    std::vector<std::uint32_t> ghost;    // N + 1 entries

    /// The all-zero current shaped for `params`.
    [[nodiscard]] static Current zero(const ChainParams& params);

    [[nodiscard]] std::size_t n_sites() const noexcept { return ghost.size(); }

    friend bool operator==(const Current&, const Current&) = default;
};

/// Vertices of odd degree, plus whether g itself has odd degree. The total
/// |vertices| + ghost_in is always even.
struct BoundarySet {
    std::vector<Site> vertices;  // ascending
    bool ghost_in = false;

    friend bool operator==(const BoundarySet&, const BoundarySet&) = default;
};

enum class Parity : std::uint8_t { even, odd };

struct ParityPattern {
    std::vector<Parity> edge_parities;  // one per lattice edge

    friend bool operator==(const ParityPattern&, const ParityPattern&) = default;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

struct PoissonParity {
    double p_zero = 1.0;
    double p_even = 1.0;
    double p_odd = 0.0;
};

/// For X ~ Poisson(rate): P(X = 0) = e^{-rate}, P(X even) = e^{-rate} cosh(rate),
/// P(X odd) = e^{-rate} sinh(rate). Throws UsageError on a negative rate.
[[nodiscard]] PoissonParity poisson_parity(double rate);

/// Draws currents for one chain. Holds per-edge distributions, so one
/// sampler per thread.
class CurrentSampler {
public:
    explicit CurrentSampler(const ChainParams& params);

    /// Lattice edges 0..N-1 first, then ghost edges 0..N, each from `engine`.
    void sample(std::mt19937_64& engine, Current& out);

private:
    std::vector<std::poisson_distribution<std::uint32_t>> lattice_;
    std::vector<std::poisson_distribution<std::uint32_t>> ghost_;
    std::vector<bool> lattice_zero_;
    std::vector<bool> ghost_zero_;
};

/// One current from an engine seeded with `seed`; reproducible.
[[nodiscard]] Current sample_current(const ChainParams& params, std::uint64_t seed);

[[nodiscard]] BoundarySet boundary(const Current& current);

/// Boundary of the ghost part alone: x with n^g(x) odd, g in when the total is odd.
[[nodiscard]] BoundarySet ghost_boundary(std::span<const std::uint32_t> ghost);
/// Boundary of the lattice part alone.
[[nodiscard]] BoundarySet lattice_boundary(std::span<const std::uint32_t> lattice);

/// Arrivals on lattice edges with J < 0 plus ghost edges with h < 0.
[[nodiscard]] std::uint64_t negative_arrivals(const ChainParams& params, const Current& current);

/// Whether x reaches g through edges where a + b is nonzero. On the chain the
/// component of x is the maximal run of positive lattice edges around it.
[[nodiscard]] bool connected_to_ghost(const Current& a, const Current& b, Site x);

/// {boundary(n1) = {}, boundary(n2) = {i, j}, i not connected to g in n1 + n2}.
[[nodiscard]] bool switching_event(const Current& n1, const Current& n2, Site i, Site j);

/// Ratio estimate of <prod_{x in sites} s_x>:
///   E[sign * 1{boundary in {A, A+g}}] / E[sign * 1{boundary in {{}, {g}}}]
/// with sign = (-1)^{negative_arrivals}. Throws InconclusiveError when the
/// denominator is within 4 standard errors of zero.
[[nodiscard]] McEstimate mc_moment(const ChainParams& params, std::span<const Site> sites,
                                   std::uint64_t samples, std::uint64_t seed);

/// Covariance from pairs of independent currents:
///   E[sign(n1 + n2) * 1{switching_event}] / E[sign * 1{boundary = {}}]^2.
/// For nonnegative parameters every sign is +1 and this is the probability
/// form. Requires i != j.
[[nodiscard]] McEstimate mc_switching_covariance(const ChainParams& params, Site i, Site j,
                                                 std::uint64_t samples, std::uint64_t seed);

enum class SplitKind { even, odd, neither };

/// How edge (x, x+1) divides the ghost mass: even when sum_{y<=x} and
/// sum_{y>x} are both even, odd when both odd, otherwise neither (possible
/// only for odd total mass).
[[nodiscard]] SplitKind splits(std::span<const std::uint32_t> ghost, std::size_t edge);

/// The pattern every edge splits `ghost` by; empty when the total is odd.
[[nodiscard]] std::optional<ParityPattern> split_pattern(std::span<const std::uint32_t> ghost);

// Exact parity enumerations. Nonnegative parameters, at most this many edges.
inline constexpr std::size_t kParityEnumerationMaxEdges = 15;

/// P(boundary(n^lattice) = boundary(n^ghost)), i.e. P(boundary(n) = {}),
/// summed over the 2^(N+1) ghost parity vectors.
[[nodiscard]] double boundary_match_probability(const ChainParams& params);

struct IdentityCheck {
    double lhs = 0.0;  // cov(s_0, s_N), transfer solver
    double rhs = 0.0;  // prod tanh J * [P(lattice even) P(ghost = 0) / P(match)]^2
};

[[nodiscard]] IdentityCheck cov_identity_check(const ChainParams& params);

struct ConditionalBound {
    double ratio = 1.0;  // P(match | ghost total even) / P(lattice even)
    double lower = 1.0;  // prod (1 + tanh J) / 2
};

[[nodiscard]] ConditionalBound conditional_bound_check(const ChainParams& params);

}  // namespace ising1d
