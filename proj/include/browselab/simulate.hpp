#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "browselab/config.hpp"
#include "browselab/grid.hpp"
#include "browselab/layout.hpp"
#include "browselab/linear.hpp"

namespace browselab {

namespace detail {

/// splitmix64 finalizer; decorrelates nearby seeds before they reach the engine.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform double in [0,1) from the top 53 bits of an engine draw.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Sub-seed for partition `index` of a run seeded with `seed`. Defined as the
/// splitmix64 finalizer of seed + (index + 1) * golden-ratio increment; stable
/// within this library, not a cross-implementation contract.
inline std::uint64_t partition_seed(std::uint64_t seed, std::uint64_t index) {
    return detail::splitmix64(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Empirical event counts from walking the browsing state machine trial by
/// trial. Counts obey exact integer identities: every trial ends in exactly
/// one of selection, abandonment (cell or row boundary), or exhaustion.
struct SimulationReport {
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> examined_count;  ///< per rank
    std::vector<std::int64_t> selected_count;  ///< per rank
    std::vector<std::int64_t> skipped_count;   ///< per row
    std::int64_t abandoned_cell_count = 0;
    std::int64_t abandoned_row_count = 0;
    std::int64_t exhausted_count = 0;

    std::int64_t selected_total() const {
        std::int64_t total = 0;
        for (std::int64_t c : selected_count) total += c;
        return total;
    }
    std::int64_t abandoned_total() const {
        return abandoned_cell_count + abandoned_row_count;
    }

    friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// Walks the browsing machine `trials` times. Per trial: at each row boundary
/// past the first, survive with rho (else a row-boundary abandonment); any
/// reached row is skipped whole with probability gamma; an entered row is
/// examined left-to-right, each cell selecting with psi'(cell) (terminal),
/// else abandoning with alpha(cell) (terminal), else continuing. Running past
/// the final row exhausts the ranking.
///
/// Deterministic for a fixed (config, relevance, layout, trials, seed) within
/// this implementation. BetaBoost decay has no machine semantics and is
/// rejected.
inline SimulationReport simulate(const BrowsingConfig& config,
                                 const RelevanceVector& relevance,
                                 const LayoutSpec& layout, std::int64_t trials,
                                 std::uint64_t seed) {
    if (config.grid.row_decay.mode == RowDecayMode::BetaBoost)
        throw std::invalid_argument(
            "beta row-decay is a corrective formula without state-machine semantics "
            "and cannot be simulated");
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    require_valid(config);
    detail::require_layout_match(relevance, layout);

    const int n = layout.total_items();
    const int n_rows = layout.rows();
    const double gamma = config.grid.row_skip;
    const double rho = config.grid.row_decay.mode == RowDecayMode::RowContinuation
                           ? config.grid.row_decay.value
                           : 1.0;

    // Per-cell probabilities are fixed across trials; hoist them.
    std::vector<double> psi_eff(static_cast<std::size_t>(n));
    std::vector<double> alpha(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        const CellAddress cell = rank_to_cell(i, layout);
        psi_eff[static_cast<std::size_t>(i - 1)] = detail::effective_psi(
            config, relevance, i, cell.col, layout.row_length(cell.row));
        alpha[static_cast<std::size_t>(i - 1)] =
            config.abandon.at_grade(relevance.grade(i));
    }

    SimulationReport report;
    report.trials = trials;
    report.seed = seed;
    report.examined_count.assign(static_cast<std::size_t>(n), 0);
    report.selected_count.assign(static_cast<std::size_t>(n), 0);
    report.skipped_count.assign(static_cast<std::size_t>(n_rows), 0);

    std::mt19937_64 eng(detail::splitmix64(seed));
    for (std::int64_t t = 0; t < trials; ++t) {
        bool terminal = false;
        for (int m = 1; m <= n_rows && !terminal; ++m) {
            if (m > 1 && detail::uniform01(eng) < 1.0 - rho) {
                ++report.abandoned_row_count;
                terminal = true;
                break;
            }
            if (detail::uniform01(eng) < gamma) {
                ++report.skipped_count[static_cast<std::size_t>(m - 1)];
                continue;
            }
            const int start = layout.row_start_rank(m);
            const int width = layout.row_length(m);
            for (int c = 0; c < width; ++c) {
                const std::size_t idx = static_cast<std::size_t>(start - 1 + c);
                ++report.examined_count[idx];
                if (detail::uniform01(eng) < psi_eff[idx]) {
                    ++report.selected_count[idx];
                    terminal = true;
                    break;
                }
                if (detail::uniform01(eng) < alpha[idx]) {
                    ++report.abandoned_cell_count;
                    terminal = true;
                    break;
                }
            }
        }
        if (!terminal) ++report.exhausted_count;
    }
    return report;
}

/// Sums two reports over the same geometry. The merged report keeps the left
/// operand's seed; callers tracking a root seed should set it afterwards.
inline SimulationReport merge(SimulationReport a, const SimulationReport& b) {
    if (a.examined_count.size() != b.examined_count.size() ||
        a.skipped_count.size() != b.skipped_count.size())
        throw std::invalid_argument("merge: reports cover different geometries");
    a.trials += b.trials;
    for (std::size_t i = 0; i < a.examined_count.size(); ++i) {
        a.examined_count[i] += b.examined_count[i];
        a.selected_count[i] += b.selected_count[i];
    }
    for (std::size_t i = 0; i < a.skipped_count.size(); ++i)
        a.skipped_count[i] += b.skipped_count[i];
    a.abandoned_cell_count += b.abandoned_cell_count;
    a.abandoned_row_count += b.abandoned_row_count;
    a.exhausted_count += b.exhausted_count;
    return a;
}

/// Runs `partitions` independent streams seeded with partition_seed(seed, k)
/// and merges their counts in partition order, so the result depends only on
/// (inputs, seed, partitions) regardless of scheduling. Trials are split as
/// evenly as possible with the remainder spread over the first partitions.
inline SimulationReport simulate_partitioned(const BrowsingConfig& config,
                                             const RelevanceVector& relevance,
                                             const LayoutSpec& layout,
                                             std::int64_t trials, std::uint64_t seed,
                                             int partitions) {
    if (partitions < 1)
        throw std::invalid_argument("simulate_partitioned: partitions must be >= 1");
    if (trials < 1) throw std::invalid_argument("simulate: trials must be >= 1");
    if (static_cast<std::int64_t>(partitions) > trials)
        partitions = static_cast<int>(trials);

    std::vector<std::future<SimulationReport>> futures;
    futures.reserve(static_cast<std::size_t>(partitions));
    const std::int64_t base = trials / partitions;
    const std::int64_t remainder = trials % partitions;
    for (int k = 0; k < partitions; ++k) {
        const std::int64_t part_trials = base + (k < remainder ? 1 : 0);
        futures.push_back(std::async(std::launch::async, [&, k, part_trials] {
            return simulate(config, relevance, layout, part_trials,
                            partition_seed(seed, static_cast<std::uint64_t>(k)));
        }));
    }
    SimulationReport merged = futures.front().get();
    for (std::size_t k = 1; k < futures.size(); ++k)
        merged = merge(std::move(merged), futures[k].get());
    merged.seed = seed;
    return merged;
}

/// Empirical frequencies with per-position binomial standard errors
/// sqrt(p_hat (1 - p_hat) / trials).
struct EmpiricalProfile {
    std::int64_t trials = 0;
    std::vector<double> examine;
    std::vector<double> select;
    std::vector<double> examine_se;
    std::vector<double> select_se;
};

inline EmpiricalProfile empirical_profile(const SimulationReport& report) {
    if (report.trials < 1)
        throw std::invalid_argument("empirical_profile: report has no trials");
    EmpiricalProfile profile;
    profile.trials = report.trials;
    const double n = static_cast<double>(report.trials);
    const std::size_t len = report.examined_count.size();
    profile.examine.resize(len);
    profile.select.resize(len);
    profile.examine_se.resize(len);
    profile.select_se.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        const double pe = static_cast<double>(report.examined_count[i]) / n;
        const double ps = static_cast<double>(report.selected_count[i]) / n;
        profile.examine[i] = pe;
        profile.select[i] = ps;
        profile.examine_se[i] = std::sqrt(pe * (1.0 - pe) / n);
        profile.select_se[i] = std::sqrt(ps * (1.0 - ps) / n);
    }
    return profile;
}

/// Result of checking one closed-form profile against one simulation run.
struct ValidationVerdict {
    bool pass = false;
    bool conservation_ok = false;  ///< report counts sum to trials exactly
    int positions_checked = 0;
    int failures = 0;
    double worst_z = 0.0;  ///< capped at 1e12 when the null standard error is 0
    int worst_rank = 0;
    std::string worst_quantity;  ///< "examine" or "select"
};

/// Per-position agreement test: pass iff |p_hat - p| <= max(z_threshold * SE,
/// abs_floor) with SE = sqrt(p (1-p) / trials) under the closed form p. Both
/// the examine and select arrays are checked, plus the exact trial-count
/// conservation identity on the report.
inline ValidationVerdict validate(const AttentionProfile& closed,
                                  const SimulationReport& report,
                                  double z_threshold = 4.0, double abs_floor = 0.005) {
    if (closed.examine.size() != report.examined_count.size())
        throw std::invalid_argument("validate: profile and report lengths differ");
    if (!(z_threshold > 0.0) || !(abs_floor > 0.0))
        throw std::invalid_argument("validate: thresholds must be positive");

    const EmpiricalProfile empirical = empirical_profile(report);
    const double n = static_cast<double>(report.trials);

    ValidationVerdict verdict;
    verdict.conservation_ok = report.selected_total() + report.abandoned_total() +
                                  report.exhausted_count ==
                              report.trials;
    verdict.pass = verdict.conservation_ok;

    const auto check = [&](const std::vector<double>& p, const std::vector<double>& p_hat,
                           const char* quantity) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double se = std::sqrt(p[i] * (1.0 - p[i]) / n);
            const double diff = std::abs(p_hat[i] - p[i]);
            const double z = se > 0.0 ? diff / se : (diff > 0.0 ? 1e12 : 0.0);
            ++verdict.positions_checked;
            if (z > verdict.worst_z) {
                verdict.worst_z = z;
                verdict.worst_rank = static_cast<int>(i) + 1;
                verdict.worst_quantity = quantity;
            }
            if (diff > std::max(z_threshold * se, abs_floor)) {
                ++verdict.failures;
                verdict.pass = false;
            }
        }
    };
    check(closed.examine, empirical.examine, "examine");
    check(closed.select, empirical.select, "select");
    return verdict;
}

}  // namespace browselab
