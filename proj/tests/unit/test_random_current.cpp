#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>

#include "ising1d/chain_model.hpp"
#include "ising1d/errors.hpp"
#include "ising1d/random_current.hpp"
#include "ising1d/transfer_solver.hpp"
#include "support/current_checks.hpp"
#include "support/oracles.hpp"

using namespace ising1d;
using ising1d::testing::BruteForce;
using ising1d::testing::random_chain;

namespace {

using ising1d::testing::Entries;
using ising1d::testing::for_each_vector;
using ising1d::testing::make_current;

// Smallest K with P(Poisson(rate) > K) below 1e-16.
std::uint32_t poisson_cap(double rate) {
    if (rate == 0.0) return 0;
    long double term = std::exp(-static_cast<long double>(rate));
    long double cdf = term;
    std::uint32_t k = 0;
    while (1.0L - cdf > 1e-16L) {
        ++k;
        term *= rate / k;
        cdf += term;
    }
    return k;
}

}  // namespace

TEST(PoissonParity, ZeroRate) {
    const auto p = poisson_parity(0.0);
    EXPECT_EQ(p.p_zero, 1.0);
    EXPECT_EQ(p.p_even, 1.0);
    EXPECT_EQ(p.p_odd, 0.0);
    EXPECT_THROW((void)poisson_parity(-0.1), UsageError);
}

TEST(PoissonParity, UnitRate) {
    EXPECT_NEAR(poisson_parity(1.0).p_even, 0.567667641618306346, 2e-16);
}

TEST(PoissonParity, MatchesSeriesAcrossGrid) {
    for (double lambda = 0.0; lambda <= 50.0; lambda += 0.05) {
        const auto p = poisson_parity(lambda);
        const auto s = ising1d::testing::poisson_parity_series(lambda);
        EXPECT_NEAR(p.p_even, static_cast<double>(s.even), 1e-15) << lambda;
        EXPECT_NEAR(p.p_odd, static_cast<double>(s.odd), 1e-15) << lambda;
        EXPECT_NEAR(p.p_zero, std::exp(-lambda), 1e-15);
        EXPECT_NEAR(p.p_even + p.p_odd, 1.0, 1e-15);
        EXPECT_GE(p.p_even, p.p_odd);
    }
}

TEST(SampleCurrent, ZeroParametersGiveZeroCurrent) {
    const ChainParams p({0.0, 0.0}, {0.0, 0.0, 0.0});
    for (std::uint64_t seed = 0; seed < 50; ++seed) EXPECT_EQ(sample_current(p, seed), Current::zero(p));
}

TEST(SampleCurrent, DeterministicPerSeed) {
    const ChainParams p({1.0, 2.0, 0.5}, {0.3, -0.7, 1.1, 0.2});
    EXPECT_EQ(sample_current(p, 99), sample_current(p, 99));
    bool differs = false;
    for (std::uint64_t seed = 0; seed < 20 && !differs; ++seed) differs = sample_current(p, seed) != sample_current(p, 99);
    EXPECT_TRUE(differs);
}

TEST(SampleCurrent, LatticeMeanIsRate) {
    const ChainParams p({1.5}, {0.0, 0.7});
    CurrentSampler sampler(p);
    std::mt19937_64 engine(5);
    Current c;
    const int n = 100'000;
    double sum = 0;
    int ghost_odd = 0;
    for (int k = 0; k < n; ++k) {
        sampler.sample(engine, c);
        sum += c.lattice[0];
        ghost_odd += c.ghost[1] & 1U;
        EXPECT_EQ(c.ghost[0], 0U);
    }
    EXPECT_NEAR(sum / n, 1.5, 4.0 * std::sqrt(1.5 / n));
    const double p_odd = std::exp(-0.7) * std::sinh(0.7);
    EXPECT_NEAR(static_cast<double>(ghost_odd) / n, p_odd, 4.0 * std::sqrt(p_odd * (1 - p_odd) / n));
}

TEST(SampleCurrent, HandshakeParityHolds) {
    std::mt19937_64 rng(61);
    const auto p = random_chain(rng, 6, 6, {-3, 3}, {-2, 2});
    CurrentSampler sampler(p);
    std::mt19937_64 engine(7);
    Current c;
    for (int k = 0; k < 100'000; ++k) {
        sampler.sample(engine, c);
        const auto b = boundary(c);
        EXPECT_EQ((b.vertices.size() + (b.ghost_in ? 1 : 0)) % 2, 0U);
    }
}

TEST(Boundary, HandCounts) {
    const ChainParams p({1.0}, {0.0, 0.0});
    EXPECT_EQ(boundary(Current::zero(p)), BoundarySet{});
    EXPECT_EQ(boundary(Current{{1}, {0, 0}}), (BoundarySet{{0, 1}, false}));
    EXPECT_EQ(boundary(Current{{0}, {1, 1}}), (BoundarySet{{0, 1}, false}));
    EXPECT_EQ(boundary(Current{{2}, {0, 3}}), (BoundarySet{{1}, true}));
    EXPECT_THROW((void)boundary(Current{{1, 1}, {0, 0}}), UsageError);
}

TEST(NegativeArrivals, Counts) {
    const Current c{{3, 2}, {1, 4, 5}};
    EXPECT_EQ(negative_arrivals(ChainParams({1.0, 1.0}, {0.1, 0.0, 2.0}), c), 0U);
    EXPECT_EQ(negative_arrivals(ChainParams({-1.0, 1.0}, {0.1, 0.0, 2.0}), c), 3U);
    EXPECT_EQ(negative_arrivals(ChainParams({1.0, 1.0}, {-0.1, 0.0, -2.0}), c), 6U);
    EXPECT_EQ(negative_arrivals(ChainParams({-1.0, -1.0}, {-0.1, 0.0, -2.0}), c), 11U);
}

TEST(Splits, HandCases) {
    const Entries zero{0, 0, 0, 0};
    for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(splits(zero, e), SplitKind::even);
    const Entries two{1, 1};
    EXPECT_EQ(splits(two, 0), SplitKind::odd);
    // ghost = [1, 0, 1]: prefix/suffix masses are (1, 1) at edge 0 and (1, 1) at edge 1.
    const Entries sparse{1, 0, 1};
    EXPECT_EQ(splits(sparse, 0), SplitKind::odd);
    EXPECT_EQ(splits(sparse, 1), SplitKind::odd);
    EXPECT_THROW((void)splits(sparse, 2), UsageError);
}

TEST(Splits, BruteForceTable) {
    // Every ghost vector of total mass <= 6 on up to five sites.
    for (std::size_t n = 2; n <= 5; ++n) {
        for_each_vector(std::vector<std::uint32_t>(n, 6), [&](const Entries& g) {
            std::uint32_t total = 0;
            for (auto v : g) total += v;
            if (total > 6) return;
            const auto pattern = split_pattern(g);
            EXPECT_EQ(pattern.has_value(), total % 2 == 0);
            for (std::size_t e = 0; e + 1 < n; ++e) {
                std::uint32_t prefix = 0;
                for (std::size_t y = 0; y <= e; ++y) prefix += g[y];
                const std::uint32_t suffix = total - prefix;
                const SplitKind expect = (prefix % 2) != (suffix % 2) ? SplitKind::neither
                                         : prefix % 2               ? SplitKind::odd
                                                                    : SplitKind::even;
                EXPECT_EQ(splits(g, e), expect);
                if (total % 2 == 0) {
                    EXPECT_NE(expect, SplitKind::neither);
                    EXPECT_EQ(pattern->edge_parities[e] == Parity::odd, expect == SplitKind::odd);
                } else {
                    EXPECT_EQ(expect, SplitKind::neither);
                }
            }
        });
    }
}

TEST(ConnectedToGhost, IntervalScan) {
    const Current a{{1, 0, 2}, {0, 0, 0, 1}};
    const Current b{{0, 0, 0}, {0, 0, 0, 0}};
    EXPECT_FALSE(connected_to_ghost(a, b, 0));
    EXPECT_FALSE(connected_to_ghost(a, b, 1));
    EXPECT_TRUE(connected_to_ghost(a, b, 2));
    EXPECT_TRUE(connected_to_ghost(a, b, 3));
    const Current c{{0, 1, 0}, {0, 0, 0, 0}};
    EXPECT_TRUE(connected_to_ghost(a, c, 0));
}

TEST(SwitchingEvent, ExhaustiveCharacterisation) {
    for (std::size_t n_sites = 2; n_sites <= 5; ++n_sites) {
        const auto r = ising1d::testing::check_switching_characterisation(n_sites, 3);
        EXPECT_EQ(r.mismatches, 0U) << "n_sites=" << n_sites;
        EXPECT_GT(r.cases, 0U);
    }
}

TEST(SwitchingEvent, PackagedPredicateAgrees) {
    using ising1d::testing::make_current;
    const std::size_t n_sites = 4;
    std::mt19937_64 rng(67);
    std::uniform_int_distribution<std::uint32_t> entry(0, 3);
    for (int k = 0; k < 200'000; ++k) {
        Entries a(2 * n_sites - 1), b(2 * n_sites - 1);
        for (auto& v : a) v = entry(rng) * (k % 2 == 0 ? 2 : 1);
        for (auto& v : b) v = entry(rng) % 2 == 0 ? 2 * entry(rng) + 1 : entry(rng);
        const Current n1 = make_current(a, n_sites);
        const Current n2 = make_current(b, n_sites);
        const auto b1 = boundary(n1);
        const auto b2 = boundary(n2);
        const bool expect = b1.vertices.empty() && !b1.ghost_in && b2.vertices == std::vector<Site>{0, n_sites - 1} &&
                            !b2.ghost_in && !connected_to_ghost(n1, n2, 0);
        ASSERT_EQ(switching_event(n1, n2, 0, n_sites - 1), expect);
        ASSERT_EQ(switching_event(n1, n2, n_sites - 1, 0), expect);
    }
}

TEST(EvenOddSplitting, ExhaustiveCharacterisation) {
    for (std::size_t n_sites = 2; n_sites <= 5; ++n_sites) {
        const auto r = ising1d::testing::check_splitting_characterisation(n_sites, 3);
        EXPECT_EQ(r.mismatches, 0U) << "n_sites=" << n_sites;
    }
}

// Z <s_A> = 2^(N+1) sum over currents with boundary A (ghost parity free) of
// prod |K|^n / n! * (-1)^(arrivals on negative parameters), truncated per entry
// where the Poisson tail is below 1e-16.
TEST(SignedCurrentExpansion, ReproducesEnumeratedMoments) {
    const std::vector<ChainParams> cases = {
        ChainParams({-0.8}, {0, 0}),
        ChainParams({1.2, -0.6}, {0, 0, 0}),
        ChainParams({0.5, -1.4, 0.9}, {0, 0, 0, 0}),
        ChainParams({-0.7, 1.1}, {0.4, -0.6, 0.3}),
    };
    for (const auto& p : cases) {
        const BruteForce bf(p);
        const std::size_t n = p.n_sites();
        std::vector<std::uint32_t> cap;
        std::vector<double> rate;
        for (double j : p.couplings()) rate.push_back(std::fabs(j));
        for (double h : p.fields()) rate.push_back(std::fabs(h));
        for (double r : rate) cap.push_back(poisson_cap(r));

        std::vector<std::vector<Site>> targets = {{}, {0}, {0, n - 1}};
        if (n > 2) targets.push_back({1, n - 1});
        for (const auto& A : targets) {
            long double sum = 0;
            for_each_vector(cap, [&](const Entries& v) {
                const Current c = make_current(v, n);
                if (boundary(c).vertices != A) return;
                long double w = 1;
                for (std::size_t k = 0; k < v.size(); ++k) {
                    w *= std::pow(static_cast<long double>(rate[k]), v[k]) / std::tgamma(v[k] + 1.0L);
                }
                sum += (negative_arrivals(p, c) & 1U) ? -w : w;
            });
            const long double lhs = std::ldexp(sum, static_cast<int>(n));
            const long double rhs = std::exp(static_cast<long double>(bf.log_z())) *
                                    bf.moment(std::vector<std::size_t>(A.begin(), A.end()));
            EXPECT_NEAR(static_cast<double>(lhs), static_cast<double>(rhs), 1e-12 * std::exp(bf.log_z()));
        }
    }
}

TEST(McMoment, SingleEdgeIsTanh) {
    const ChainParams p({1.0}, {0.0, 0.0});
    const std::array<Site, 2> s{0, 1};
    const auto est = mc_moment(p, s, 1'000'000, 17);
    EXPECT_EQ(est.samples, 1'000'000U);
    EXPECT_NEAR(est.mean, std::tanh(1.0), 4.0 * est.std_error);
    EXPECT_GT(est.std_error, 0.0);
}

TEST(McMoment, ZeroFieldSingletonIsZero) {
    const ChainParams p({1.0, 0.4}, {0.0, 0.0, 0.0});
    const std::array<Site, 1> s{1};
    const auto est = mc_moment(p, s, 200'000, 3);
    EXPECT_EQ(est.mean, 0.0);
}

TEST(McMoment, MatchesEnumerationOnSmallChains) {
    std::mt19937_64 rng(62);
    for (int k = 0; k < 5; ++k) {
        const auto p = random_chain(rng, 3, 7, {0, 1.5}, {0, 1});
        const std::array<Site, 2> s{0, p.last_site()};
        const std::array<Site, 1> one{1};
        const auto est = mc_moment(p, s, 400'000, 100 + k);
        EXPECT_NEAR(est.mean, expectation_enum(p, s), 4.0 * est.std_error);
        const auto est1 = mc_moment(p, one, 400'000, 200 + k);
        EXPECT_NEAR(est1.mean, expectation_enum(p, one), 4.0 * est1.std_error);
    }
}

TEST(McMoment, SignedParameters) {
    const ChainParams p({-0.6, 0.8}, {0.3, -0.2, 0.1});
    const std::array<Site, 2> s{0, 2};
    const auto est = mc_moment(p, s, 1'000'000, 8);
    EXPECT_NEAR(est.mean, expectation_enum(p, s), 4.0 * est.std_error);
}

TEST(McMoment, Preconditions) {
    const ChainParams p({1.0}, {0.0, 0.0});
    const std::array<Site, 1> s{0};
    EXPECT_THROW((void)mc_moment(p, s, 0, 1), UsageError);
    const std::array<Site, 1> bad{4};
    EXPECT_THROW((void)mc_moment(p, bad, 10, 1), UsageError);
}

TEST(McMoment, InconclusiveWhenNormalizerVanishes) {
    // Strong negative couplings: the sign-weighted normalizer is tiny relative to its noise.
    const auto p = ChainParams::uniform(13, -3.0, -2.0);
    const std::array<Site, 1> s{0};
    EXPECT_THROW((void)mc_moment(p, s, 2000, 1), InconclusiveError);
}

TEST(McSwitchingCovariance, SingleEdgeIsTanh) {
    const auto est = mc_switching_covariance(ChainParams({1.0}, {0.0, 0.0}), 0, 1, 1'000'000, 21);
    EXPECT_NEAR(est.mean, std::tanh(1.0), 4.0 * est.std_error);
}

TEST(McSwitchingCovariance, StrongFieldMatchesTransferSolver) {
    const auto p = ChainParams::uniform(5, 1.0, 2.0);
    const auto est = mc_switching_covariance(p, 0, 4, 1'000'000, 22);
    EXPECT_NEAR(est.mean, covariance(p, 0, 4), 4.0 * est.std_error);
}

TEST(McSwitchingCovariance, ZeroEdgeGivesZero) {
    const auto est = mc_switching_covariance(ChainParams({1.0, 0.0, 1.0}, {0.2, 0.2, 0.2, 0.2}), 0, 3, 100'000, 23);
    EXPECT_EQ(est.mean, 0.0);
    // Never observed, so the error is one event's worth rather than zero.
    EXPECT_GT(est.std_error, 0.0);
    EXPECT_LT(est.std_error, 1e-3);
}

TEST(McSwitchingCovariance, SignedWeights) {
    const ChainParams p({-0.7, 0.9}, {0.2, 0.1, -0.3});
    const auto est = mc_switching_covariance(p, 0, 2, 1'000'000, 24);
    EXPECT_NEAR(est.mean, covariance(p, 0, 2), 4.0 * est.std_error);
}

TEST(McSwitchingCovariance, OrderOfSitesIrrelevant) {
    const auto p = ChainParams::uniform(4, 0.8, 0.3);
    const auto a = mc_switching_covariance(p, 0, 3, 50'000, 25);
    const auto b = mc_switching_covariance(p, 3, 0, 50'000, 25);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
}

TEST(McEstimators, StandardErrorShrinksLikeRootTwo) {
    const auto p = ChainParams::uniform(4, 0.9, 0.4);
    const auto small = mc_switching_covariance(p, 0, 3, 200'000, 31);
    const auto large = mc_switching_covariance(p, 0, 3, 400'000, 31);
    EXPECT_NEAR(small.std_error / large.std_error, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
    const std::array<Site, 2> s{0, 3};
    const auto m_small = mc_moment(p, s, 200'000, 32);
    const auto m_large = mc_moment(p, s, 400'000, 32);
    EXPECT_NEAR(m_small.std_error / m_large.std_error, std::sqrt(2.0), 0.05 * std::sqrt(2.0));
}

TEST(McEstimators, DeterministicForSeed) {
    const auto p = ChainParams::uniform(4, 0.9, 0.4);
    const auto a = mc_switching_covariance(p, 0, 3, 60'000, 77);
    const auto b = mc_switching_covariance(p, 0, 3, 60'000, 77);
    const auto c = mc_switching_covariance(p, 0, 3, 60'000, 78);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.std_error, b.std_error);
    EXPECT_NE(a.mean, c.mean);
}

TEST(BoundaryMatchProbability, ZeroFieldIsAllEven) {
    const ChainParams p({0.4, 1.3, 2.0}, {0, 0, 0, 0});
    double expect = 1.0;
    for (double j : p.couplings()) expect *= std::exp(-j) * std::cosh(j);
    EXPECT_NEAR(boundary_match_probability(p), expect, 1e-15);
}

TEST(BoundaryMatchProbability, FrozenValues) {
    EXPECT_NEAR(boundary_match_probability(ChainParams({1.0, 0.5}, {0.3, 0.2, 0.1})), 0.242751863163272040, 1e-15);
    EXPECT_NEAR(boundary_match_probability(ChainParams({1.0}, {0.3, 0.2})), 0.383217743168797176, 1e-15);
}

TEST(BoundaryMatchProbability, SingleEdgeFourTermSum) {
    const double J = 1.0, h0 = 0.3, h1 = 0.2;
    const auto l = poisson_parity(J);
    const auto a = poisson_parity(h0);
    const auto b = poisson_parity(h1);
    // Ghost parities (even, even) need an even lattice edge, (odd, odd) an odd one.
    const double four = a.p_even * b.p_even * l.p_even + a.p_odd * b.p_odd * l.p_odd;
    EXPECT_NEAR(boundary_match_probability(ChainParams({J}, {h0, h1})), four, 1e-16);
}

TEST(BoundaryMatchProbability, MatchesAllParityEnumeration) {
    std::mt19937_64 rng(63);
    for (int k = 0; k < 50; ++k) {
        const auto p = random_chain(rng, 2, 7, {0, 3}, {0, 2});
        const std::size_t n = p.n_sites();
        const std::size_t edges = 2 * n - 1;
        double total = 0;
        // Parity of every lattice and ghost edge; match iff all lattice-plus-ghost
        // degrees are even at every vertex, with even ghost total.
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << edges); ++bits) {
            Entries l(n - 1), g(n);
            double w = 1;
            for (std::size_t e = 0; e + 1 < n; ++e) {
                l[e] = (bits >> e) & 1U;
                const auto pp = poisson_parity(p.coupling(e));
                w *= l[e] ? pp.p_odd : pp.p_even;
            }
            for (std::size_t x = 0; x < n; ++x) {
                g[x] = (bits >> (n - 1 + x)) & 1U;
                const auto pp = poisson_parity(p.field(x));
                w *= g[x] ? pp.p_odd : pp.p_even;
            }
            if (lattice_boundary(l) == ghost_boundary(g)) total += w;
        }
        EXPECT_NEAR(boundary_match_probability(p), total, 1e-14);
        double floor = 1;
        for (double j : p.couplings()) floor *= poisson_parity(j).p_even;
        for (double h : p.fields()) floor *= std::exp(-h);
        EXPECT_GE(boundary_match_probability(p), floor);
    }
}

TEST(BoundaryMatchProbability, AgreesWithSampledCurrents) {
    const ChainParams p({1.0}, {0.3, 0.2});
    CurrentSampler sampler(p);
    std::mt19937_64 engine(64);
    Current c;
    const int n = 400'000;
    int hits = 0;
    for (int k = 0; k < n; ++k) {
        sampler.sample(engine, c);
        hits += lattice_boundary(c.lattice) == ghost_boundary(c.ghost);
    }
    const double q = boundary_match_probability(p);
    EXPECT_NEAR(static_cast<double>(hits) / n, q, 4.0 * std::sqrt(q * (1 - q) / n));
}

TEST(BoundaryMatchProbability, Preconditions) {
    EXPECT_THROW((void)boundary_match_probability(ChainParams({-1.0}, {0, 0})), PreconditionError);
    EXPECT_THROW((void)boundary_match_probability(ChainParams({1.0}, {0, -0.1})), PreconditionError);
    EXPECT_THROW((void)boundary_match_probability(ChainParams::uniform(17, 1.0, 0.1)), CapacityError);
}

TEST(CovIdentity, ZeroFieldCollapses) {
    const auto r = cov_identity_check(ChainParams({0.4, 1.3, 2.0}, {0, 0, 0, 0}));
    EXPECT_NEAR(r.lhs, std::tanh(0.4) * std::tanh(1.3) * std::tanh(2.0), 1e-15);
    EXPECT_NEAR(r.rhs, r.lhs, 1e-15);
}

TEST(CovIdentity, ThreeSiteInstance) {
    const auto r = cov_identity_check(ChainParams({1.0, 0.5}, {0.3, 0.2, 0.1}));
    EXPECT_NEAR(r.lhs, 0.271157177969958502, 1e-15);
    EXPECT_NEAR(r.rhs, r.lhs, 1e-10 * r.lhs);
}

TEST(CovIdentity, HoldsOnRandomInstances) {
    std::mt19937_64 rng(65);
    for (int k = 0; k < 100; ++k) {
        const auto p = random_chain(rng, 2, 13, {0, 3}, {0, 2});
        const auto r = cov_identity_check(p);
        EXPECT_NEAR(r.rhs, r.lhs, 1e-10 * std::fabs(r.lhs)) << k;
    }
}

TEST(ConditionalBound, ZeroFieldRatioIsOne) {
    const auto r = conditional_bound_check(ChainParams({0.4, 1.3}, {0, 0, 0}));
    EXPECT_NEAR(r.ratio, 1.0, 1e-15);
    EXPECT_LE(r.lower, 1.0);
}

TEST(ConditionalBound, FieldOnFirstSiteOnly) {
    const auto r = conditional_bound_check(ChainParams({0.4, 1.3, 0.2}, {1.5, 0, 0, 0}));
    EXPECT_NEAR(r.ratio, 1.0, 1e-15);
}

TEST(ConditionalBound, HoldsOnRandomInstances) {
    std::mt19937_64 rng(66);
    for (int k = 0; k < 200; ++k) {
        const auto p = random_chain(rng, 2, 13, {0, 3}, {0, 2});
        const auto r = conditional_bound_check(p);
        EXPECT_GE(r.ratio - r.lower, -1e-12);
    }
}
