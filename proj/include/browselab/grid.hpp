#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "browselab/config.hpp"
#include "browselab/layout.hpp"
#include "browselab/linear.hpp"

namespace browselab {

/// AttentionProfile plus per-row reach/skip quantities. total_abandon is the
/// aggregate of the two abandonment channels kept in the split fields.
struct GridAttentionProfile : AttentionProfile {
    double total_abandon_cell = 0.0;  ///< terminated at a cell after examining it
    double total_abandon_row = 0.0;   ///< lost at a row boundary (1 - rho events)
    std::vector<double> row_reach;    ///< P[row k is reached], index 0 = row 1
    std::vector<double> row_skipped;  ///< P[row k skipped | reached]
};

/// Gaussian middle-bias weight for a column of a row: peak 1 at the center
/// column, symmetric about it. The effective selection probability of a cell
/// is psi(cell) * weight(col).
inline double middle_bias_weight(int col, int row_width, double sigma) {
    if (row_width < 1 || col < 1 || col > row_width)
        throw std::out_of_range("middle_bias_weight: column " + std::to_string(col) +
                                " outside [1," + std::to_string(row_width) + "]");
    if (!(sigma > 0.0))
        throw std::invalid_argument("middle_bias_weight: sigma must be positive");
    const double mid = (static_cast<double>(row_width) + 1.0) / 2.0;
    const double d = static_cast<double>(col) - mid;
    return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

namespace detail {

inline double effective_psi(const BrowsingConfig& config, const RelevanceVector& rel,
                            int rank, int col, int row_width) {
    double psi = selection_prob(rank, rel, config.selection);
    if (config.grid.middle_bias.mode == MiddleBiasMode::Gaussian)
        psi *= middle_bias_weight(col, row_width, config.grid.middle_bias.sigma);
    return psi;
}

inline void require_layout_match(const RelevanceVector& rel, const LayoutSpec& layout) {
    if (rel.size() != layout.total_items())
        throw std::invalid_argument(
            "relevance length " + std::to_string(rel.size()) +
            " does not match layout cell count " + std::to_string(layout.total_items()));
}

}  // namespace detail

/// Closed-form attention for a grid layout under the row-boundary machine:
/// entering row k (k >= 2) survives a rho check, any reached row is skipped
/// whole with probability gamma, and an entered row is walked left-to-right
/// with the usual select/abandon/continue step per cell. In closed form, with
/// k = row(i), c = col(i) and S_m the no-termination survival of row m,
///
///   P[E_i] = rho^(k-1) * prod_{m<k} [gamma + (1-gamma) S_m]
///            * (1-gamma) * prod_{c'<c} (1 - psi'(k,c')) (1 - alpha(k,c')),
///
/// where psi' carries the optional middle-bias weight. A single-column layout
/// with gamma = 0 and rho = 1 reproduces examine_prob_linear exactly.
///
/// BetaBoost decay has no machine semantics and is rejected here; use
/// paper_formula_examine_prob for that variant.
inline GridAttentionProfile examine_prob_grid(const BrowsingConfig& config,
                                              const RelevanceVector& relevance,
                                              const LayoutSpec& layout) {
    if (config.grid.row_decay.mode == RowDecayMode::BetaBoost)
        throw std::invalid_argument(
            "beta row-decay is a corrective formula without state-machine semantics; "
            "use paper_formula_examine_prob(SlowerDecayBeta, ...) instead");
    require_valid(config);
    detail::require_layout_match(relevance, layout);

    const double gamma = config.grid.row_skip;
    const double rho = config.grid.row_decay.mode == RowDecayMode::RowContinuation
                           ? config.grid.row_decay.value
                           : 1.0;
    const int n = layout.total_items();
    const int n_rows = layout.rows();

    GridAttentionProfile profile;
    profile.examine.resize(static_cast<std::size_t>(n));
    profile.select.resize(static_cast<std::size_t>(n));
    profile.row_reach.resize(static_cast<std::size_t>(n_rows));
    profile.row_skipped.assign(static_cast<std::size_t>(n_rows), gamma);

    double reach = 1.0;  // P[row m reached], i.e. alive at its skip decision
    for (int m = 1; m <= n_rows; ++m) {
        if (m > 1) {
            profile.total_abandon_row += reach * (1.0 - rho);
            reach *= rho;
        }
        profile.row_reach[static_cast<std::size_t>(m - 1)] = reach;

        const int width = layout.row_length(m);
        const int start = layout.row_start_rank(m);
        double walk = reach * (1.0 - gamma);  // P[cell examined]
        double survival = 1.0;                // within-row no-termination product
        for (int c = 1; c <= width; ++c) {
            const int rank = start + c - 1;
            const double psi = detail::effective_psi(config, relevance, rank, c, width);
            const double alpha = config.abandon.at_grade(relevance.grade(rank));
            const std::size_t idx = static_cast<std::size_t>(rank - 1);
            profile.examine[idx] = walk;
            profile.select[idx] = walk * psi;
            profile.total_select += walk * psi;
            profile.total_abandon_cell += walk * (1.0 - psi) * alpha;
            const double step = (1.0 - psi) * (1.0 - alpha);
            walk *= step;
            survival *= step;
        }
        reach *= gamma + (1.0 - gamma) * survival;
    }
    profile.total_exhaust = reach;
    profile.total_abandon = profile.total_abandon_cell + profile.total_abandon_row;
    return profile;
}

/// P[S_i] projection of the grid profile.
inline std::vector<double> select_prob_grid(const BrowsingConfig& config,
                                            const RelevanceVector& relevance,
                                            const LayoutSpec& layout) {
    return examine_prob_grid(config, relevance, layout).select;
}

// ---------------------------------------------------------------------------
// Published grid formulas, reproduced literally (with documented repairs).

enum class PaperVariant {
    SlowerDecayBeta,  ///< beta^(row-1) boost on the plain cascade product
    RowSkipLiteral,   ///< row-skip bracket, first row always entered
};

/// Examine probabilities from a published formula, plus one note per repair
/// that had to be applied to make the formula well defined.
struct PaperFormulaResult {
    std::vector<double> examine;
    std::vector<std::string> notes;
};

/// Literal evaluation of the published grid formulas. These are corrective
/// formulas, not outcome distributions: SlowerDecayBeta can exceed the linear
/// profile by design and is clamped to [0,1]; RowSkipLiteral leaves the first
/// row unskippable. Neither participates in conservation or oracle checks.
inline PaperFormulaResult paper_formula_examine_prob(PaperVariant variant,
                                                     const BrowsingConfig& config,
                                                     const RelevanceVector& relevance,
                                                     const LayoutSpec& layout) {
    require_valid(config);
    detail::require_layout_match(relevance, layout);

    const int n = layout.total_items();
    PaperFormulaResult result;
    result.examine.resize(static_cast<std::size_t>(n));

    if (variant == PaperVariant::SlowerDecayBeta) {
        if (config.grid.row_decay.mode != RowDecayMode::BetaBoost)
            throw std::invalid_argument(
                "SlowerDecayBeta requires row_decay mode \"beta\" with its decay value");
        const double beta = config.grid.row_decay.value;
        double product = 1.0;  // prod_{j<i} (1 - psi(j)), row-major
        double boost = 1.0;    // beta^(row-1)
        int prev_row = 1;
        for (int i = 1; i <= n; ++i) {
            const int row = rank_to_cell(i, layout).row;
            for (; prev_row < row; ++prev_row) boost *= beta;
            result.examine[static_cast<std::size_t>(i - 1)] =
                std::min(boost * product, 1.0);
            product *= 1.0 - selection_prob(i, relevance, config.selection);
        }
        result.notes = {
            "decay exponent applied as row(i)-1, leaving the first row unmodified",
            "pre-position product taken over ranks j = 1..i-1 in reading order",
            "value clamped to [0,1]; this variant is a corrective formula, not an "
            "outcome distribution",
            "selection factors (1 - psi(j)) only: abandonment, row skipping, and "
            "middle bias are not part of this formula",
        };
        return result;
    }

    // RowSkipLiteral
    const double gamma = config.grid.row_skip;
    double bracket = 1.0;  // prod over prior rows of [gamma + (1-gamma) S_m]
    for (int m = 1; m <= layout.rows(); ++m) {
        const int width = layout.row_length(m);
        const int start = layout.row_start_rank(m);
        // First row carries no entry factor; later rows charge (1-gamma).
        double walk = m == 1 ? bracket : bracket * (1.0 - gamma);
        double survival = 1.0;
        for (int c = 1; c <= width; ++c) {
            const int rank = start + c - 1;
            result.examine[static_cast<std::size_t>(rank - 1)] = walk;
            const double step = 1.0 - selection_prob(rank, relevance, config.selection);
            walk *= step;
            survival *= step;
        }
        bracket *= gamma + (1.0 - gamma) * survival;
    }
    result.notes = {
        "skip bracket factorized per row as prod_m [gamma + (1-gamma) S_m] in place "
        "of the published two-branch sum (the two agree when at most one row "
        "precedes)",
        "current-row product bounded to columns before c(i)",
        "first row treated as always entered, so its cells carry no (1-gamma) "
        "factor; the state-machine form charges (1-gamma) for every row",
        "selection factors (1 - psi(j)) only: abandonment, row-continuation decay, "
        "and middle bias are not part of this formula",
    };
    return result;
}

}  // namespace browselab
