#pragma once

#include <vector>

#include "browselab/config.hpp"

namespace browselab {

/// Per-rank examination/selection probabilities plus the split of the three
/// absorbing outcomes. Produced by state-machine-consistent closed forms, so
/// total_select + total_abandon + total_exhaust = 1 up to rounding.
struct AttentionProfile {
    std::vector<double> examine;  ///< P[E_i], index 0 = rank 1
    std::vector<double> select;   ///< P[S_i] = P[E_i] * psi(i)
    double total_select = 0.0;
    double total_abandon = 0.0;
    double total_exhaust = 0.0;  ///< browsed past the final item
};

/// Closed-form attention for a linear layout.
///
/// The walk examines rank 1 unconditionally; at each rank it selects with
/// psi(i), otherwise abandons with alpha(i), otherwise continues. Hence
///
///   P[E_i] = prod_{j<i} (1 - psi(j)) (1 - alpha(j))
///
/// which under constant parameters is the familiar (1-psi)^(i-1) (1-alpha)^(i-1)
/// exponential decay. Grid-only fields of the config are ignored.
inline AttentionProfile examine_prob_linear(const BrowsingConfig& config,
                                            const RelevanceVector& relevance) {
    require_valid(config);
    const int n = relevance.size();

    AttentionProfile profile;
    profile.examine.resize(static_cast<std::size_t>(n));
    profile.select.resize(static_cast<std::size_t>(n));

    double reach = 1.0;
    for (int i = 1; i <= n; ++i) {
        const double psi = selection_prob(i, relevance, config.selection);
        const double alpha = config.abandon.at_grade(relevance.grade(i));
        const std::size_t idx = static_cast<std::size_t>(i - 1);
        profile.examine[idx] = reach;
        profile.select[idx] = reach * psi;
        profile.total_select += reach * psi;
        profile.total_abandon += reach * (1.0 - psi) * alpha;
        reach *= (1.0 - psi) * (1.0 - alpha);
    }
    profile.total_exhaust = reach;
    return profile;
}

/// P[S_i] for every rank; with alpha = 0 this is the cascade selection
/// distribution psi(i) * prod_{j<i} (1 - psi(j)).
inline std::vector<double> select_prob_linear(const BrowsingConfig& config,
                                              const RelevanceVector& relevance) {
    return examine_prob_linear(config, relevance).select;
}

}  // namespace browselab
