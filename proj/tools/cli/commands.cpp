#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "ising1d/chain_model.hpp"
#include "ising1d/errors.hpp"
#include "ising1d/random_current.hpp"
#include "ising1d/serialization.hpp"
#include "ising1d/transfer_solver.hpp"
#include "json.hpp"

namespace ising1d::cli {

namespace {

using nlohmann::json;

constexpr double kZThreshold = 4.0;

struct PairArgs {
    std::optional<std::size_t> i;
    std::optional<std::size_t> j;
};

std::pair<Site, Site> resolve_pair(const ChainParams& params, const PairArgs& a) {
    const Site i = a.i.value_or(0);
    const Site j = a.j.value_or(params.last_site());
    if (i >= params.n_sites() || j >= params.n_sites()) throw UsageError("site out of range");
    if (i == j) throw UsageError("sites i and j must differ");
    return {i, j};
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_spec,
                           std::ostream& err) {
    if (flag) return *flag;
    if (from_spec) return *from_spec;
    std::random_device rd;
    const std::uint64_t seed = (std::uint64_t{rd()} << 32) ^ rd();
    err << "seed: " << seed << '\n';
    return seed;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string optional_cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string{}; }

void update_min(std::optional<double>& slot, const std::optional<BoundEntry>& e) {
    if (e) slot = slot ? std::min(*slot, e->slack) : e->slack;
}

int cmd_exact(const ChainParams& params, const PairArgs& pair_args, const std::string& format,
              std::ostream& out) {
    const auto [i, j] = resolve_pair(params, pair_args);
    const TransferSolver solver(params);
    json r;
    r["i"] = i;
    r["j"] = j;
    r["log_z"] = solver.log_partition();
    r["mean_i"] = solver.site_mean(i);
    r["mean_j"] = solver.site_mean(j);
    r["pair_expectation"] = solver.pair_expectation(std::min(i, j), std::max(i, j));
    r["covariance"] = solver.covariance(i, j);
    if (params.n_sites() <= kEnumerationCap) {
        const std::array<Site, 1> si{i};
        const std::array<Site, 1> sj{j};
        r["enum"] = {{"log_z", std::log(partition_function_enum(params))},
                     {"mean_i", expectation_enum(params, si)},
                     {"mean_j", expectation_enum(params, sj)},
                     {"covariance", covariance_enum(params, i, j)}};
    }
    if (format == "csv") {
        out << "i,j,log_z,mean_i,mean_j,pair_expectation,covariance\n"
            << i << ',' << j << ',' << format_real(r["log_z"]) << ',' << format_real(r["mean_i"]) << ','
            << format_real(r["mean_j"]) << ',' << format_real(r["pair_expectation"]) << ','
            << format_real(r["covariance"]) << '\n';
    } else {
        out << r.dump() << '\n';
    }
    return kExitOk;
}

int cmd_bounds(const ChainParams& params, const PairArgs& pair_args, const std::string& format,
               const CompareOptions& options, double tamper, std::ostream& out, std::ostream& err) {
    const auto [i0, j0] = resolve_pair(params, pair_args);
    BoundReport report = compare(params, std::min(i0, j0), std::max(i0, j0), options);
    if (tamper != 0.0) {
        for (auto* e : {&report.thm1, &report.thm2, &report.lemma3, &report.zero_field}) {
            if (*e) {
                (*e)->value -= tamper;
                (*e)->slack -= tamper;
            }
        }
    }
    if (format == "csv") {
        out << bound_report_csv_header() << '\n' << to_csv_row(report) << '\n';
    } else {
        out << to_json(report) << '\n';
    }
    const auto violated = report.violations();
    if (!violated.empty()) {
        err << "bound violation:";
        for (const auto& name : violated) err << ' ' << name;
        err << '\n';
        return kExitBoundViolation;
    }
    return kExitOk;
}

int cmd_sweep(const InstanceSpec& spec, std::uint64_t seed, std::uint64_t count, PairPolicy pairs,
              const std::string& format, const CompareOptions& options, std::ostream& out,
              std::ostream& err) {
    if (count == 0) throw UsageError("--count must be at least 1");
    const SweepResult result = run_sweep(spec, seed, count, pairs, options);
    if (format == "json") {
        json rows = json::array();
        for (const auto& row : result.rows) {
            json o = json::parse(to_json(row.report));
            o["instance"] = row.instance;
            o["seed"] = row.seed;
            o["n_sites"] = row.n_sites;
            o["violation"] = row.violation;
            rows.push_back(std::move(o));
        }
        out << rows.dump() << '\n';
    } else {
        out << "instance,seed,n_sites," << bound_report_csv_header() << ",violation\n";
        for (const auto& row : result.rows) {
            out << row.instance << ',' << row.seed << ',' << row.n_sites << ','
                << to_csv_row(row.report) << ',' << (row.violation ? 1 : 0) << '\n';
        }
    }
    err << "summary: rows=" << result.rows.size() << " violations=" << result.violations
        << " min_slack_thm1=" << optional_cell(result.min_slack_thm1)
        << " min_slack_thm2=" << optional_cell(result.min_slack_thm2)
        << " min_slack_lemma3=" << optional_cell(result.min_slack_lemma3)
        << " min_slack_zero_field=" << optional_cell(result.min_slack_zero_field) << '\n';
    return result.violations == 0 ? kExitOk : kExitBoundViolation;
}

int cmd_mc(const ChainParams& params, const PairArgs& pair_args, std::uint64_t samples,
           std::uint64_t seed, std::ostream& out) {
    const auto [i, j] = resolve_pair(params, pair_args);
    const McEstimate est = mc_switching_covariance(params, i, j, samples, seed);
    const double exact = covariance(params, i, j);
    double z = 0.0;
    if (est.std_error > 0.0) {
        z = (est.mean - exact) / est.std_error;
    } else if (std::fabs(est.mean - exact) > kDominanceTolerance) {
        z = std::copysign(INFINITY, est.mean - exact);
    }
    json r = json::parse(to_json(est));
    r["i"] = i;
    r["j"] = j;
    r["seed"] = seed;
    r["exact"] = exact;
    r["z_score"] = std::isfinite(z) ? json(z) : json(nullptr);
    out << r.dump() << '\n';
    return std::fabs(z) <= kZThreshold ? kExitOk : kExitMcInconsistent;
}

int cmd_decay(const std::vector<ChainParams>& instances, const std::vector<std::size_t>& windows,
              const std::string& format, std::ostream& out, std::ostream& err) {
    std::vector<DecayRow> rows;
    for (std::size_t k = 0; k < instances.size(); ++k) {
        const auto& params = instances[k];
        std::vector<std::size_t> distances = windows;
        if (distances.empty()) {
            for (std::size_t d = 1; d < params.n_sites(); ++d) distances.push_back(d);
        }
        auto part = decay_rows(params, k, distances);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    std::size_t violations = 0;
    std::size_t flagged = 0;
    for (const auto& r : rows) {
        violations += r.flag == "violation";
        flagged += r.flag == "nonpositive";
    }
    if (format == "json") {
        json a = json::array();
        for (const auto& r : rows) {
            a.push_back({{"instance", r.instance},
                         {"distance", r.distance},
                         {"rate", optional_json(r.rate)},
                         {"bound_rate", r.bound_rate},
                         {"zero_field_rate", r.zero_field_rate},
                         {"flag", r.flag}});
        }
        out << a.dump() << '\n';
    } else {
        out << "instance,distance,rate,bound_rate,zero_field_rate,flag\n";
        for (const auto& r : rows) {
            out << r.instance << ',' << r.distance << ',' << optional_cell(r.rate) << ','
                << format_real(r.bound_rate) << ',' << format_real(r.zero_field_rate) << ',' << r.flag
                << '\n';
        }
    }
    err << "summary: rows=" << rows.size() << " nonpositive=" << flagged << " violations=" << violations
        << '\n';
    return violations == 0 ? kExitOk : kExitBoundViolation;
}

std::vector<std::size_t> parse_windows(const std::string& text) {
    std::vector<std::size_t> out;
    if (text.empty()) return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string item = text.substr(pos, comma - pos);
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            if (used != item.size() || v < 1) throw std::invalid_argument(item);
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw ParseError("--windows expects a comma-separated list of positive integers");
        }
        pos = comma + 1;
    }
    return out;
}

}  // namespace

SweepResult run_sweep(const InstanceSpec& spec, std::uint64_t root_seed, std::uint64_t count,
                      PairPolicy pairs, const CompareOptions& options) {
    std::vector<std::vector<SweepRow>> per_instance(count);
    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        for (std::uint64_t k = first; k < count; k += stride) {
            const GeneratedInstance inst = generate_instance(spec, root_seed, k);
            const std::size_t n = inst.params.n_sites();
            auto emit = [&](Site i, Site j) {
                SweepRow row{k, inst.seed, n, compare(inst.params, i, j, options), false};
                row.violation = !row.report.violations().empty();
                per_instance[k].push_back(std::move(row));
            };
            if (n < 2) continue;
            if (pairs == PairPolicy::endpoints) {
                emit(0, n - 1);
            } else {
                for (Site i = 0; i < n; ++i)
                    for (Site j = i + 1; j < n; ++j) emit(i, j);
            }
        }
    };
    const std::uint64_t workers =
        std::clamp<std::uint64_t>(std::thread::hardware_concurrency(), 1, std::max<std::uint64_t>(count, 1));
    if (workers == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> threads;
        for (std::uint64_t w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    }

    SweepResult result;
    for (auto& rows : per_instance) {
        for (auto& row : rows) {
            result.violations += row.violation;
            update_min(result.min_slack_thm1, row.report.thm1);
            update_min(result.min_slack_thm2, row.report.thm2);
            update_min(result.min_slack_lemma3, row.report.lemma3);
            update_min(result.min_slack_zero_field, row.report.zero_field);
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

std::vector<DecayRow> decay_rows(const ChainParams& params, std::uint64_t instance,
                                 const std::vector<std::size_t>& distances) {
    if (!params.has_nonnegative_couplings()) {
        throw PreconditionError("decay requires nonnegative couplings");
    }
    const TransferSolver solver(params);
    std::vector<DecayRow> rows;
    for (std::size_t d : distances) {
        if (d < 1 || d >= params.n_sites()) continue;
        DecayRow r;
        r.instance = instance;
        r.distance = d;
        r.rate = finite_decay_rate(solver, 0, d);
        r.bound_rate = bound_implied_rate(params, 0, d);
        r.zero_field_rate = -std::log(bound_zero_field(params, 0, d)) / static_cast<double>(d);
        if (!r.rate) {
            r.flag = "nonpositive";
        } else if (*r.rate * static_cast<double>(d) < r.bound_rate * static_cast<double>(d) - kDominanceTolerance) {
            r.flag = "violation";
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact solver, covariance bounds and random-current checks for 1D Ising chains", "ising1d"};
    app.require_subcommand(1);

    std::string instance_file;
    std::string spec_file;
    PairArgs pair;
    std::string format = "json";
    std::string flag;
    std::optional<std::uint64_t> seed;
    std::uint64_t samples = 1'000'000;
    std::uint64_t count = 1;
    std::string pairs_name = "endpoints";
    std::optional<std::size_t> n_sites_override;
    std::string windows_text;
    std::size_t enum_cap = kEnumerationCap;
    double tamper = 0.0;

    auto add_pair = [&](CLI::App* sub) {
        sub->add_option("-i,--i", pair.i, "First site (default 0)");
        sub->add_option("-j,--j", pair.j, "Second site (default N)");
    };
    auto add_out = [&](CLI::App* sub, const std::string& def) {
        format = def;
        sub->add_option("--out", format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    };
    auto add_flag = [&](CLI::App* sub) {
        sub->add_option("--flag", flag, "proof-route: signed-field bound with end fields from (J, |h|)")
            ->check(CLI::IsMember({"proof-route"}));
    };

    auto* exact = app.add_subcommand("exact", "Transfer-solver covariance, means and log Z");
    exact->add_option("--instance", instance_file, "Instance JSON file")->required();
    add_pair(exact);
    exact->add_option("--out", format)->check(CLI::IsMember({"json", "csv"}));

    auto* bounds = app.add_subcommand("bounds", "Exact covariance against every applicable bound");
    bounds->add_option("--instance", instance_file, "Instance JSON file")->required();
    add_pair(bounds);
    bounds->add_option("--out", format)->check(CLI::IsMember({"json", "csv"}));
    add_flag(bounds);
    bounds->add_option("--enum-cap", enum_cap, "Enumeration cross-check up to this many sites");
    bounds->add_option("--tamper", tamper, "Subtract from every bound (failure-path testing)")->group("");

    auto* sweep = app.add_subcommand("sweep", "Bound dominance over generated instances");
    sweep->add_option("--spec", spec_file, "Instance spec JSON file")->required();
    sweep->add_option("--count", count, "Number of instances");
    sweep->add_option("--seed", seed, "Root seed (overrides the spec)");
    sweep->add_option("--pairs", pairs_name, "endpoints | all")->check(CLI::IsMember({"endpoints", "all"}));
    sweep->add_option("--out", format)->check(CLI::IsMember({"json", "csv"}));
    sweep->add_option("--enum-cap", enum_cap, "Enumeration cross-check up to this many sites (0 = off)");
    add_flag(sweep);

    auto* mc = app.add_subcommand("mc", "Random-current Monte Carlo covariance with z-score");
    mc->add_option("--instance", instance_file, "Instance JSON file")->required();
    add_pair(mc);
    mc->add_option("--samples", samples, "Paired current samples")->check(CLI::PositiveNumber);
    mc->add_option("--seed", seed, "Root seed");
    mc->add_option("--out", format)->check(CLI::IsMember({"json"}));

    auto* decay = app.add_subcommand("decay", "Finite-window decay rates against the bound-implied rate");
    auto* decay_spec = decay->add_option("--spec", spec_file, "Instance spec JSON file");
    decay->add_option("--instance", instance_file, "Instance JSON file")->excludes(decay_spec);
    decay->add_option("--n-sites", n_sites_override, "Chain length, overrides the spec")
        ->check(CLI::PositiveNumber);
    decay->add_option("--windows", windows_text, "Distances d for the pairs (0, d), comma separated");
    decay->add_option("--count", count, "Number of generated instances");
    decay->add_option("--seed", seed, "Root seed (overrides the spec)");
    decay->add_option("--out", format)->check(CLI::IsMember({"json", "csv"}));

    sweep->callback([&] {
        if (!sweep->get_option("--out")->count()) format = "csv";
    });
    decay->callback([&] {
        if (!decay->get_option("--out")->count()) format = "csv";
    });
    (void)add_out;

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitParse;
    }

    CompareOptions options;
    options.enum_cap = enum_cap;
    if (flag == "proof-route") options.route = EffectiveFieldRoute::absolute_model;

    try {
        if (exact->parsed()) return cmd_exact(load_chain_params(instance_file), pair, format, out);
        if (bounds->parsed()) {
            return cmd_bounds(load_chain_params(instance_file), pair, format, options, tamper, out, err);
        }
        if (sweep->parsed()) {
            const InstanceSpec spec = InstanceSpec::load(spec_file);
            if (!sweep->get_option("--enum-cap")->count()) options.enum_cap = 0;
            return cmd_sweep(spec, resolve_seed(seed, spec.seed, err), count,
                             pairs_name == "all" ? PairPolicy::all : PairPolicy::endpoints, format,
                             options, out, err);
        }
        if (mc->parsed()) {
            return cmd_mc(load_chain_params(instance_file), pair, samples,
                          resolve_seed(seed, std::nullopt, err), out);
        }
        if (decay->parsed()) {
            const auto windows = parse_windows(windows_text);
            std::vector<ChainParams> instances;
            if (!instance_file.empty()) {
                instances.push_back(load_chain_params(instance_file));
            } else if (!spec_file.empty()) {
                InstanceSpec spec = InstanceSpec::load(spec_file);
                if (n_sites_override) spec.min_sites = spec.max_sites = *n_sites_override;
                const std::uint64_t root = resolve_seed(seed, spec.seed, err);
                if (count == 0) throw UsageError("--count must be at least 1");
                for (std::uint64_t k = 0; k < count; ++k) {
                    instances.push_back(generate_instance(spec, root, k).params);
                }
            } else {
                throw UsageError("decay needs --spec or --instance");
            }
            return cmd_decay(instances, windows, format, out, err);
        }
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return kExitParse;
    } catch (const InconclusiveError& e) {
        err << "inconclusive: " << e.what() << '\n';
        return kExitMcInconsistent;
    } catch (const UsageError& e) {
        err << "precondition: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const CapacityError& e) {
        err << "precondition: " << e.what() << '\n';
        return kExitPrecondition;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace ising1d::cli
