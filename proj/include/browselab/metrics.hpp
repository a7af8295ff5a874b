#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "browselab/config.hpp"
#include "browselab/grid.hpp"
#include "browselab/linear.hpp"

namespace browselab {

/// Rank-biased precision over the N retrieved items (no residual tail):
///
///   RBP = (1 - lambda) * sum_i y_i * lambda^(i-1)
///
/// Grades must be binary; graded input is reduced by y > 0 -> 1 only when
/// `reduce_graded` is set, otherwise it is rejected.
inline double rbp(const RelevanceVector& relevance, double lambda,
                  bool reduce_graded = false) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("rbp: lambda = " + std::to_string(lambda) +
                                    " outside (0,1)");
    if (!relevance.is_binary() && !reduce_graded)
        throw std::invalid_argument(
            "rbp: relevance is graded; pass reduce_graded to binarize y > 0");
    double sum = 0.0;
    double weight = 1.0;  // lambda^(i-1)
    for (int i = 1; i <= relevance.size(); ++i) {
        if (relevance.grade(i) > 0) sum += weight;
        weight *= lambda;
    }
    return (1.0 - lambda) * sum;
}

/// Expected reciprocal rank under the graded cascade:
///
///   ERR = sum_i (1/i) * psi(i) * prod_{j<i} (1 - psi(j)),  psi(i) = map[grade_i].
inline double err(const RelevanceVector& relevance, const std::vector<double>& grade_map) {
    double sum = 0.0;
    double not_stopped = 1.0;
    for (int i = 1; i <= relevance.size(); ++i) {
        const int g = relevance.grade(i);
        if (static_cast<std::size_t>(g) >= grade_map.size())
            throw std::out_of_range("err: grade " + std::to_string(g) +
                                    " has no entry in the grade map (size " +
                                    std::to_string(grade_map.size()) + ")");
        const double psi = grade_map[static_cast<std::size_t>(g)];
        sum += not_stopped * psi / static_cast<double>(i);
        not_stopped *= 1.0 - psi;
    }
    return sum;
}

/// ERR with the standard (2^g - 1)/2^g_max mapping for the vector's g_max.
inline double err(const RelevanceVector& relevance) {
    return err(relevance, default_graded_map(relevance.g_max()));
}

/// Assignment of each rank to one group label. Labels may include groups no
/// rank maps to; those report zero exposure.
struct GroupAssignment {
    std::map<int, std::string> group_of;  ///< 1-based rank -> label
    std::set<std::string> labels;

    static GroupAssignment from_map(std::map<int, std::string> group_of) {
        GroupAssignment a;
        for (const auto& [rank, label] : group_of) a.labels.insert(label);
        a.group_of = std::move(group_of);
        return a;
    }
};

/// Attention mass per group: exposure[g] = sum of examine[i] over ranks in g.
/// Every rank 1..N must be mapped.
inline std::map<std::string, double> group_exposure(std::span<const double> examine,
                                                    const GroupAssignment& groups) {
    std::map<std::string, double> exposure;
    for (const auto& label : groups.labels) exposure[label] = 0.0;
    for (std::size_t idx = 0; idx < examine.size(); ++idx) {
        const int rank = static_cast<int>(idx) + 1;
        const auto it = groups.group_of.find(rank);
        if (it == groups.group_of.end())
            throw std::invalid_argument("group_exposure: rank " + std::to_string(rank) +
                                        " has no group assignment");
        exposure[it->second] += examine[idx];
    }
    return exposure;
}

inline std::map<std::string, double> group_exposure(const AttentionProfile& profile,
                                                    const GroupAssignment& groups) {
    return group_exposure(std::span<const double>(profile.examine), groups);
}

}  // namespace browselab
