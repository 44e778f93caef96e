#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/instance_spec.hpp"
#include "ising1d/bounds.hpp"

namespace ising1d::cli {

/// Process exit codes; part of the tool's contract.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitParse = 2,
    kExitPrecondition = 3,
    kExitBoundViolation = 4,
    kExitMcInconsistent = 5,
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

enum class PairPolicy { endpoints, all };

struct SweepRow {
    std::uint64_t instance = 0;
    std::uint64_t seed = 0;
    std::size_t n_sites = 0;
    BoundReport report;
    bool violation = false;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t violations = 0;
    // Smallest slack seen per bound; empty when that bound never applied.
    std::optional<double> min_slack_thm1, min_slack_thm2, min_slack_lemma3, min_slack_zero_field;
};

/// Rows come back in (instance, i, j) order whatever the worker count.
[[nodiscard]] SweepResult run_sweep(const InstanceSpec& spec, std::uint64_t root_seed,
                                    std::uint64_t count, PairPolicy pairs,
                                    const CompareOptions& options);

struct DecayRow {
    std::uint64_t instance = 0;
    std::size_t distance = 0;
    std::optional<double> rate;  // -log cov(s_0, s_d) / d; empty if cov <= 0
    double bound_rate = 0.0;     // -log bound_thm1(0, d) / d
    double zero_field_rate = 0.0;
    std::string flag;  // "", "nonpositive" or "violation"
};

/// One row per distance d in `distances` with 1 <= d <= N (others skipped).
/// Requires nonnegative couplings.
[[nodiscard]] std::vector<DecayRow> decay_rows(const ChainParams& params, std::uint64_t instance,
                                               const std::vector<std::size_t>& distances);

}  // namespace ising1d::cli
