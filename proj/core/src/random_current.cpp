#include "ising1d/random_current.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <thread>

#include "ising1d/errors.hpp"
#include "ising1d/transfer_solver.hpp"
#include "numerics.hpp"

namespace ising1d {

namespace {

constexpr std::uint64_t kBlockSize = std::uint64_t{1} << 14;

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Raw sums of two per-sample observables. Observables are multiples of 1/2
// in [-1, 1], so the sums are exact and merge order is irrelevant.
struct Moments {
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;

    void add(double x, double y) {
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    void merge(const Moments& o) {
        n += o.n;
        sx += o.sx;
        sy += o.sy;
        sxx += o.sxx;
        syy += o.syy;
        sxy += o.sxy;
    }
};

// Splits [0, samples) into fixed-size blocks, each with its own engine
// derived from (seed, block index). Blocks are spread over threads and their
// partial sums merged in block order: the result depends only on seed and
// sample count.
template <class MakeKernel>
Moments run_blocks(std::uint64_t samples, std::uint64_t seed, MakeKernel make_kernel) {
    const std::uint64_t n_blocks = (samples + kBlockSize - 1) / kBlockSize;
    std::vector<Moments> partial(n_blocks);
    const std::uint64_t n_workers =
        std::clamp<std::uint64_t>(std::thread::hardware_concurrency(), 1, std::max<std::uint64_t>(n_blocks, 1));

    auto work = [&](std::uint64_t worker) {
        auto kernel = make_kernel();
        for (std::uint64_t b = worker; b < n_blocks; b += n_workers) {
            auto engine = seeded_engine(seed, b);
            const std::uint64_t count = std::min(kBlockSize, samples - b * kBlockSize);
            for (std::uint64_t s = 0; s < count; ++s) kernel(engine, partial[b]);
        }
    };
    if (n_workers == 1) {
        work(0);
    } else {
        std::vector<std::jthread> threads;
        for (std::uint64_t w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
    }
    Moments total;
    for (const auto& p : partial) total.merge(p);
    return total;
}

struct MeanCov {
    double mx, my, vxx, vyy, vxy;
};

MeanCov mean_cov(const Moments& m) {
    MeanCov r{};
    r.mx = m.sx / m.n;
    r.my = m.sy / m.n;
    r.vxx = std::max(0.0, m.sxx / m.n - r.mx * r.mx);
    // No numerator events at all: charge the variance of a single one, so a
    // rare event that was simply not seen does not report zero uncertainty.
    if (m.sxx == 0.0) r.vxx = (1.0 / m.n) * (1.0 - 1.0 / m.n);
    r.vyy = std::max(0.0, m.syy / m.n - r.my * r.my);
    r.vxy = m.sxy / m.n - r.mx * r.my;
    return r;
}

void require_conclusive(const MeanCov& mc, double n) {
    const double se = std::sqrt(mc.vyy / n);
    if (mc.my == 0.0 || std::fabs(mc.my) <= 4.0 * se) {
        throw InconclusiveError("normalizer estimate not separated from zero by 4 standard errors");
    }
}

void require_site(std::size_t n_sites, Site x) {
    if (x >= n_sites) throw UsageError("site " + std::to_string(x) + " out of range");
}

// Degree parity of every vertex (1 = odd) into `out`.
void vertex_parities(const Current& c, std::vector<std::uint8_t>& out) {
    const std::size_t n = c.ghost.size();
    out.assign(n, 0);
    for (std::size_t x = 0; x < n; ++x) out[x] = c.ghost[x] & 1U;
    for (std::size_t e = 0; e < c.lattice.size(); ++e) {
        const std::uint8_t p = c.lattice[e] & 1U;
        out[e] ^= p;
        out[e + 1] ^= p;
    }
}

bool no_odd_vertex(const std::vector<std::uint8_t>& parity) {
    return std::none_of(parity.begin(), parity.end(), [](std::uint8_t p) { return p != 0; });
}

double sign_of(std::uint64_t negative) { return (negative & 1U) ? -1.0 : 1.0; }

void require_parity_enumerable(const ChainParams& params, const char* what) {
    if (!params.has_nonnegative_couplings() || !params.has_nonnegative_fields()) {
        throw PreconditionError(std::string(what) + " requires nonnegative couplings and fields");
    }
    if (params.n_edges() > kParityEnumerationMaxEdges) {
        throw CapacityError(std::string(what) + " limited to " +
                            std::to_string(kParityEnumerationMaxEdges) + " edges");
    }
}

}  // namespace

Current Current::zero(const ChainParams& params) {
    return Current{std::vector<std::uint32_t>(params.n_edges(), 0),
                   std::vector<std::uint32_t>(params.n_sites(), 0)};
}

PoissonParity poisson_parity(double rate) {
    if (!(rate >= 0.0)) throw UsageError("Poisson rate must be nonnegative");
    // e^{-r} cosh r = (1 + e^{-2r}) / 2 and e^{-r} sinh r = -expm1(-2r) / 2.
    return PoissonParity{std::exp(-rate), 0.5 * (1.0 + std::exp(-2.0 * rate)),
                         -0.5 * std::expm1(-2.0 * rate)};
}

CurrentSampler::CurrentSampler(const ChainParams& params) {
    auto fill = [](std::span<const double> rates, auto& dists, auto& zero) {
        for (double r : rates) {
            const double rate = std::fabs(r);
            zero.push_back(rate == 0.0);
            // poisson_distribution requires a positive mean; zero-rate slots
            // are never drawn from.
            dists.emplace_back(rate == 0.0 ? 1.0 : rate);
        }
    };
    fill(params.couplings(), lattice_, lattice_zero_);
    fill(params.fields(), ghost_, ghost_zero_);
}

void CurrentSampler::sample(std::mt19937_64& engine, Current& out) {
    out.lattice.resize(lattice_.size());
    out.ghost.resize(ghost_.size());
    for (std::size_t e = 0; e < lattice_.size(); ++e) {
        out.lattice[e] = lattice_zero_[e] ? 0U : lattice_[e](engine);
    }
    for (std::size_t x = 0; x < ghost_.size(); ++x) {
        out.ghost[x] = ghost_zero_[x] ? 0U : ghost_[x](engine);
    }
}

Current sample_current(const ChainParams& params, std::uint64_t seed) {
    auto engine = seeded_engine(seed, 0);
    CurrentSampler sampler(params);
    Current c;
    sampler.sample(engine, c);
    return c;
}

BoundarySet boundary(const Current& current) {
    if (current.lattice.size() + 1 != current.ghost.size()) {
        throw UsageError("current needs N lattice and N + 1 ghost entries");
    }
    std::vector<std::uint8_t> parity;
    vertex_parities(current, parity);
    BoundarySet b;
    std::uint64_t ghost_total = 0;
    for (std::size_t x = 0; x < parity.size(); ++x) {
        if (parity[x]) b.vertices.push_back(x);
        ghost_total += current.ghost[x];
    }
    b.ghost_in = ghost_total & 1U;
    return b;
}

BoundarySet ghost_boundary(std::span<const std::uint32_t> ghost) {
    BoundarySet b;
    std::uint64_t total = 0;
    for (std::size_t x = 0; x < ghost.size(); ++x) {
        if (ghost[x] & 1U) b.vertices.push_back(x);
        total += ghost[x];
    }
    b.ghost_in = total & 1U;
    return b;
}

BoundarySet lattice_boundary(std::span<const std::uint32_t> lattice) {
    return boundary(Current{{lattice.begin(), lattice.end()},
                            std::vector<std::uint32_t>(lattice.size() + 1, 0)});
}

std::uint64_t negative_arrivals(const ChainParams& params, const Current& current) {
    if (current.lattice.size() != params.n_edges() || current.ghost.size() != params.n_sites()) {
        throw UsageError("current shape does not match the chain");
    }
    std::uint64_t count = 0;
    for (std::size_t e = 0; e < current.lattice.size(); ++e) {
        if (params.coupling(e) < 0.0) count += current.lattice[e];
    }
    for (std::size_t x = 0; x < current.ghost.size(); ++x) {
        if (params.field(x) < 0.0) count += current.ghost[x];
    }
    return count;
}

bool connected_to_ghost(const Current& a, const Current& b, Site x) {
    const std::size_t n = a.ghost.size();
    require_site(n, x);
    auto open = [&](std::size_t e) { return a.lattice[e] + b.lattice[e] > 0; };
    Site lo = x;
    while (lo > 0 && open(lo - 1)) --lo;
    Site hi = x;
    while (hi + 1 < n && open(hi)) ++hi;
    for (Site y = lo; y <= hi; ++y) {
        if (a.ghost[y] + b.ghost[y] > 0) return true;
    }
    return false;
}

bool switching_event(const Current& n1, const Current& n2, Site i, Site j) {
    const BoundarySet b1 = boundary(n1);
    if (!b1.vertices.empty() || b1.ghost_in) return false;
    const BoundarySet b2 = boundary(n2);
    if (b2.ghost_in) return false;
    const std::vector<Site> target = i < j ? std::vector<Site>{i, j} : std::vector<Site>{j, i};
    if (b2.vertices != target) return false;
    return !connected_to_ghost(n1, n2, i);
}

McEstimate mc_moment(const ChainParams& params, std::span<const Site> sites, std::uint64_t samples,
                     std::uint64_t seed) {
    if (samples == 0) throw UsageError("samples must be at least 1");
    std::vector<std::uint8_t> target(params.n_sites(), 0);
    for (Site x : sites) {
        require_site(params.n_sites(), x);
        target[x] ^= 1U;
    }
    auto make_kernel = [&] {
        return [&params, &target, sampler = CurrentSampler(params), current = Current{},
                parity = std::vector<std::uint8_t>{}](std::mt19937_64& engine,
                                                      Moments& m) mutable {
            sampler.sample(engine, current);
            vertex_parities(current, parity);
            const double s = sign_of(negative_arrivals(params, current));
            const double x = parity == target ? s : 0.0;
            const double y = no_odd_vertex(parity) ? s : 0.0;
            m.add(x, y);
        };
    };
    const Moments m = run_blocks(samples, seed, make_kernel);
    const MeanCov mc = mean_cov(m);
    require_conclusive(mc, m.n);
    const double r = mc.mx / mc.my;
    const double var = (mc.vxx - 2.0 * r * mc.vxy + r * r * mc.vyy) / (m.n * mc.my * mc.my);
    return McEstimate{r, std::sqrt(std::max(0.0, var)), samples};
}

McEstimate mc_switching_covariance(const ChainParams& params, Site i, Site j,
                                   std::uint64_t samples, std::uint64_t seed) {
    if (samples == 0) throw UsageError("samples must be at least 1");
    require_site(params.n_sites(), i);
    require_site(params.n_sites(), j);
    if (i == j) throw UsageError("covariance requires distinct sites");
    if (i > j) std::swap(i, j);

    auto make_kernel = [&] {
        return [&params, i, j, sampler = CurrentSampler(params), n1 = Current{}, n2 = Current{},
                parity = std::vector<std::uint8_t>{}](std::mt19937_64& engine,
                                                      Moments& m) mutable {
            sampler.sample(engine, n1);
            sampler.sample(engine, n2);
            const std::uint64_t neg1 = negative_arrivals(params, n1);
            const std::uint64_t neg2 = negative_arrivals(params, n2);

            vertex_parities(n1, parity);
            const bool empty1 = no_odd_vertex(parity);
            vertex_parities(n2, parity);
            const bool empty2 = no_odd_vertex(parity);
            bool pair_boundary = parity[i] && parity[j];
            if (pair_boundary) {
                parity[i] = 0;
                parity[j] = 0;
                pair_boundary = no_odd_vertex(parity);
            }
            const bool event = empty1 && pair_boundary && !connected_to_ghost(n1, n2, i);
            const double x = event ? sign_of(neg1 + neg2) : 0.0;
            const double y = 0.5 * ((empty1 ? sign_of(neg1) : 0.0) + (empty2 ? sign_of(neg2) : 0.0));
            m.add(x, y);
        };
    };
    const Moments m = run_blocks(samples, seed, make_kernel);
    const MeanCov mc = mean_cov(m);
    require_conclusive(mc, m.n);
    const double y2 = mc.my * mc.my;
    const double r = mc.mx / y2;
    // Delta method for x / y^2.
    const double var = (mc.vxx / (y2 * y2) - 4.0 * mc.mx * mc.vxy / (y2 * y2 * mc.my) +
                        4.0 * mc.mx * mc.mx * mc.vyy / (y2 * y2 * y2)) /
                       m.n;
    return McEstimate{r, std::sqrt(std::max(0.0, var)), samples};
}

SplitKind splits(std::span<const std::uint32_t> ghost, std::size_t edge) {
    if (ghost.empty() || edge + 1 >= ghost.size()) throw UsageError("edge out of range");
    std::uint64_t prefix = 0;
    std::uint64_t suffix = 0;
    for (std::size_t y = 0; y < ghost.size(); ++y) (y <= edge ? prefix : suffix) += ghost[y];
    const bool p = prefix & 1U;
    const bool s = suffix & 1U;
    if (p != s) return SplitKind::neither;
    return p ? SplitKind::odd : SplitKind::even;
}

std::optional<ParityPattern> split_pattern(std::span<const std::uint32_t> ghost) {
    std::uint64_t total = 0;
    for (auto g : ghost) total += g;
    if (total & 1U) return std::nullopt;
    ParityPattern p;
    std::uint64_t prefix = 0;
    for (std::size_t e = 0; e + 1 < ghost.size(); ++e) {
        prefix += ghost[e];
        p.edge_parities.push_back((prefix & 1U) ? Parity::odd : Parity::even);
    }
    return p;
}

double boundary_match_probability(const ChainParams& params) {
    require_parity_enumerable(params, "boundary_match_probability");
    const std::size_t n = params.n_sites();
    std::vector<PoissonParity> ghost(n);
    std::vector<PoissonParity> lattice(params.n_edges());
    for (std::size_t x = 0; x < n; ++x) ghost[x] = poisson_parity(params.field(x));
    for (std::size_t e = 0; e < lattice.size(); ++e) lattice[e] = poisson_parity(params.coupling(e));

    // Bit x of `odd` is the parity of n^g(x). The lattice parity forced on
    // edge e is the parity of the ghost mass on sites 0..e.
    double total = 0.0;
    for (std::uint32_t odd = 0; odd < (std::uint32_t{1} << n); ++odd) {
        if (std::popcount(odd) & 1) continue;
        double p = 1.0;
        bool prefix_odd = false;
        for (std::size_t x = 0; x < n; ++x) {
            const bool bit = (odd >> x) & 1U;
            p *= bit ? ghost[x].p_odd : ghost[x].p_even;
            prefix_odd ^= bit;
            if (x < lattice.size()) p *= prefix_odd ? lattice[x].p_odd : lattice[x].p_even;
        }
        total += p;
    }
    return total;
}

IdentityCheck cov_identity_check(const ChainParams& params) {
    require_parity_enumerable(params, "cov_identity_check");
    if (params.n_sites() < 2) throw UsageError("cov_identity_check needs at least two sites");
    IdentityCheck r;
    r.lhs = TransferSolver(params).covariance(0, params.last_site());

    double log_rhs = 0.0;
    double log_lattice_even = 0.0;
    for (double j : params.couplings()) {
        log_rhs += detail::log_tanh(j);
        log_lattice_even += std::log(poisson_parity(j).p_even);
    }
    double ghost_mass = 0.0;
    for (double h : params.fields()) ghost_mass += h;
    const double log_ratio = log_lattice_even - ghost_mass - std::log(boundary_match_probability(params));
    r.rhs = std::exp(log_rhs + 2.0 * log_ratio);
    return r;
}

ConditionalBound conditional_bound_check(const ChainParams& params) {
    require_parity_enumerable(params, "conditional_bound_check");
    double lattice_even = 1.0;
    double lower = 1.0;
    for (double j : params.couplings()) {
        lattice_even *= poisson_parity(j).p_even;
        lower *= 0.5 * (1.0 + std::tanh(j));
    }
    double ghost_mass = 0.0;
    for (double h : params.fields()) ghost_mass += h;
    const double ghost_total_even = poisson_parity(ghost_mass).p_even;
    return ConditionalBound{boundary_match_probability(params) / ghost_total_even / lattice_even, lower};
}

}  // namespace ising1d
