#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace browselab {

/// Per-rank relevance grades y(d|q). Binary relevance is g_max = 1.
class RelevanceVector {
public:
    RelevanceVector(std::vector<int> grades, int g_max = 1)
        : grades_(std::move(grades)), g_max_(g_max) {
        if (g_max_ < 1) throw std::invalid_argument("relevance: g_max must be >= 1");
        if (grades_.empty()) throw std::invalid_argument("relevance: empty grade list");
        for (int g : grades_) {
            if (g < 0 || g > g_max_)
                throw std::invalid_argument("relevance: grade " + std::to_string(g) +
                                            " outside [0," + std::to_string(g_max_) + "]");
        }
    }

    static RelevanceVector binary(std::vector<int> grades) {
        return RelevanceVector(std::move(grades), 1);
    }

    int size() const { return static_cast<int>(grades_.size()); }
    int g_max() const { return g_max_; }
    bool is_binary() const { return g_max_ == 1; }

    /// Grade at a 1-based rank.
    int grade(int rank) const {
        if (rank < 1 || rank > size())
            throw std::out_of_range("relevance: rank " + std::to_string(rank) +
                                    " outside [1," + std::to_string(size()) + "]");
        return grades_[static_cast<std::size_t>(rank - 1)];
    }

    const std::vector<int>& grades() const { return grades_; }

private:
    std::vector<int> grades_;
    int g_max_;
};

enum class SelectionMode { Constant, BinaryRelevance, Graded };

/// Selection probability psi as a function of the examined item's relevance.
struct SelectionModel {
    SelectionMode mode = SelectionMode::Constant;
    double psi = 0.0;         ///< Constant mode
    double psi_rel = 0.0;     ///< BinaryRelevance, grade >= 1
    double psi_nonrel = 0.0;  ///< BinaryRelevance, grade 0
    std::vector<double> grade_map;  ///< Graded mode, index = grade

    static SelectionModel constant(double psi) {
        SelectionModel m;
        m.mode = SelectionMode::Constant;
        m.psi = psi;
        return m;
    }
    static SelectionModel binary(double psi_rel, double psi_nonrel) {
        SelectionModel m;
        m.mode = SelectionMode::BinaryRelevance;
        m.psi_rel = psi_rel;
        m.psi_nonrel = psi_nonrel;
        return m;
    }
    static SelectionModel graded(std::vector<double> grade_map) {
        SelectionModel m;
        m.mode = SelectionMode::Graded;
        m.grade_map = std::move(grade_map);
        return m;
    }
};

/// The standard graded stop-probability mapping g -> (2^g - 1) / 2^g_max.
/// Index g runs 0..g_max; map[0] = 0 and map[g_max] < 1.
inline std::vector<double> default_graded_map(int g_max) {
    if (g_max < 1) throw std::invalid_argument("default_graded_map: g_max must be >= 1");
    std::vector<double> map(static_cast<std::size_t>(g_max) + 1);
    const double denom = std::exp2(static_cast<double>(g_max));
    for (int g = 0; g <= g_max; ++g)
        map[static_cast<std::size_t>(g)] = (std::exp2(static_cast<double>(g)) - 1.0) / denom;
    return map;
}

/// Probability of terminating after a non-selection, optionally conditioned
/// on the grade of the just-examined item. Equal fields express constant alpha.
struct AbandonModel {
    double alpha_rel = 0.0;
    double alpha_nonrel = 0.0;

    static AbandonModel constant(double alpha) { return {alpha, alpha}; }
    static AbandonModel by_relevance(double alpha_rel, double alpha_nonrel) {
        return {alpha_rel, alpha_nonrel};
    }

    double at_grade(int grade) const { return grade >= 1 ? alpha_rel : alpha_nonrel; }
    bool is_constant() const { return alpha_rel == alpha_nonrel; }
};

enum class RowDecayMode {
    None,             ///< no per-row attenuation
    BetaBoost,        ///< beta^(row-1) corrective factor; formula-only, no machine
    RowContinuation,  ///< survive each row boundary with probability rho
};

struct RowDecay {
    RowDecayMode mode = RowDecayMode::None;
    double value = 1.0;  ///< beta (>= 1) or rho ((0,1]) depending on mode

    static RowDecay none() { return {}; }
    static RowDecay beta_boost(double beta) { return {RowDecayMode::BetaBoost, beta}; }
    static RowDecay row_continuation(double rho) {
        return {RowDecayMode::RowContinuation, rho};
    }
};

enum class MiddleBiasMode { None, Gaussian };

struct MiddleBias {
    MiddleBiasMode mode = MiddleBiasMode::None;
    double sigma = 1.0;

    static MiddleBias none() { return {}; }
    static MiddleBias gaussian(double sigma) { return {MiddleBiasMode::Gaussian, sigma}; }
};

/// Grid-only behavior: row skipping, row-level attention decay, middle bias.
struct GridBehavior {
    double row_skip = 0.0;  ///< gamma: probability an entire row is bypassed
    RowDecay row_decay = RowDecay::none();
    MiddleBias middle_bias = MiddleBias::none();

    static GridBehavior off() { return {}; }
};

/// The full parameter bundle of the browsing model.
struct BrowsingConfig {
    SelectionModel selection;
    AbandonModel abandon;
    GridBehavior grid;
};

/// psi(i): conditional selection probability of the item at `rank` (1-based).
/// Depends only on the model and the grade at that rank.
inline double selection_prob(int rank, const RelevanceVector& relevance,
                             const SelectionModel& model) {
    const int g = relevance.grade(rank);  // range-checks the rank
    switch (model.mode) {
        case SelectionMode::Constant:
            return model.psi;
        case SelectionMode::BinaryRelevance:
            return g >= 1 ? model.psi_rel : model.psi_nonrel;
        case SelectionMode::Graded:
            if (static_cast<std::size_t>(g) >= model.grade_map.size())
                throw std::out_of_range("selection: grade " + std::to_string(g) +
                                        " has no entry in the grade map (size " +
                                        std::to_string(model.grade_map.size()) + ")");
            return model.grade_map[static_cast<std::size_t>(g)];
    }
    throw std::logic_error("selection: unknown mode");
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    enum class Severity { Error, Warning };
    Severity severity;
    std::string parameter;  ///< config-schema path, e.g. "abandon.alpha"
    std::string message;
};

namespace detail {

// Published calibration ranges. Exact 0 and 1 are exempt from range warnings:
// the preset definitions themselves need them (alpha = 0, psi_nonrel = 0, ...).
inline constexpr double kRangeLo = 0.1;
inline constexpr double kRangeHi = 0.9;
inline constexpr double kBetaLo = 1.1;
inline constexpr double kBetaHi = 2.0;
// Boundary slop so derived values like psi = 1 - 0.9 do not trip the warning.
inline constexpr double kRangeEps = 1e-9;

inline void check_probability(std::vector<Violation>& out, const std::string& param,
                              double v, bool exclusive_top = false) {
    if (!(v >= 0.0) || v > 1.0 || (exclusive_top && v == 1.0)) {
        out.push_back({Violation::Severity::Error, param,
                       param + " = " + std::to_string(v) + " outside [0,1" +
                           (exclusive_top ? ")" : "]")});
        return;
    }
    if (v == 0.0 || v == 1.0) return;
    if (v < kRangeLo - kRangeEps || v > kRangeHi + kRangeEps)
        out.push_back({Violation::Severity::Warning, param,
                       param + " = " + std::to_string(v) +
                           " outside the published calibration range [0.1,0.9]"});
}

}  // namespace detail

/// Checks every active parameter. Hard errors for values outside their legal
/// domain; advisory warnings for legal values outside the published
/// calibration ranges (probabilities [0.1,0.9], beta [1.1,2.0]).
inline std::vector<Violation> validate_config(const BrowsingConfig& config) {
    using detail::check_probability;
    std::vector<Violation> out;

    switch (config.selection.mode) {
        case SelectionMode::Constant:
            check_probability(out, "selection.psi", config.selection.psi);
            break;
        case SelectionMode::BinaryRelevance:
            check_probability(out, "selection.psi_rel", config.selection.psi_rel);
            check_probability(out, "selection.psi_nonrel", config.selection.psi_nonrel);
            break;
        case SelectionMode::Graded: {
            const auto& map = config.selection.grade_map;
            if (map.size() < 2) {
                out.push_back({Violation::Severity::Error, "selection.grade_map",
                               "selection.grade_map must cover grades 0..g_max with "
                               "g_max >= 1"});
                break;
            }
            for (std::size_t g = 0; g < map.size(); ++g) {
                if (!(map[g] >= 0.0) || map[g] > 1.0)
                    out.push_back({Violation::Severity::Error,
                                   "selection.grade_map." + std::to_string(g),
                                   "grade map value " + std::to_string(map[g]) +
                                       " outside [0,1]"});
            }
            for (std::size_t g = 1; g < map.size(); ++g) {
                if (map[g] < map[g - 1]) {
                    out.push_back({Violation::Severity::Error, "selection.grade_map",
                                   "grade map must be monotone non-decreasing"});
                    break;
                }
            }
            break;
        }
    }

    if (config.abandon.is_constant()) {
        check_probability(out, "abandon.alpha", config.abandon.alpha_rel,
                          /*exclusive_top=*/true);
    } else {
        check_probability(out, "abandon.alpha_rel", config.abandon.alpha_rel,
                          /*exclusive_top=*/true);
        check_probability(out, "abandon.alpha_nonrel", config.abandon.alpha_nonrel,
                          /*exclusive_top=*/true);
    }

    check_probability(out, "grid.row_skip", config.grid.row_skip);

    switch (config.grid.row_decay.mode) {
        case RowDecayMode::None:
            break;
        case RowDecayMode::BetaBoost: {
            const double beta = config.grid.row_decay.value;
            if (!(beta >= 1.0)) {
                out.push_back({Violation::Severity::Error, "grid.row_decay.beta",
                               "grid.row_decay.beta = " + std::to_string(beta) +
                                   " must be >= 1"});
            } else if (beta < detail::kBetaLo - detail::kRangeEps ||
                       beta > detail::kBetaHi + detail::kRangeEps) {
                out.push_back({Violation::Severity::Warning, "grid.row_decay.beta",
                               "grid.row_decay.beta = " + std::to_string(beta) +
                                   " outside the published calibration range [1.1,2.0]"});
            }
            break;
        }
        case RowDecayMode::RowContinuation: {
            const double rho = config.grid.row_decay.value;
            if (!(rho > 0.0) || rho > 1.0) {
                out.push_back({Violation::Severity::Error, "grid.row_decay.rho",
                               "grid.row_decay.rho = " + std::to_string(rho) +
                                   " outside (0,1]"});
            } else if (rho != 1.0 &&
                       (rho < detail::kRangeLo - detail::kRangeEps ||
                        rho > detail::kRangeHi + detail::kRangeEps)) {
                out.push_back({Violation::Severity::Warning, "grid.row_decay.rho",
                               "grid.row_decay.rho = " + std::to_string(rho) +
                                   " outside the published calibration range [0.1,0.9]"});
            }
            break;
        }
    }

    if (config.grid.middle_bias.mode == MiddleBiasMode::Gaussian) {
        const double sigma = config.grid.middle_bias.sigma;
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            out.push_back({Violation::Severity::Error, "grid.middle_bias.sigma",
                           "grid.middle_bias.sigma must be a positive finite value"});
    }

    return out;
}

inline bool has_errors(const std::vector<Violation>& violations) {
    return std::any_of(violations.begin(), violations.end(), [](const Violation& v) {
        return v.severity == Violation::Severity::Error;
    });
}

/// Throws std::invalid_argument listing every hard error. Warnings pass.
inline void require_valid(const BrowsingConfig& config) {
    const auto violations = validate_config(config);
    std::string msg;
    for (const auto& v : violations) {
        if (v.severity != Violation::Severity::Error) continue;
        if (!msg.empty()) msg += "; ";
        msg += v.message;
    }
    if (!msg.empty()) throw std::invalid_argument("invalid browsing config: " + msg);
}

// ---------------------------------------------------------------------------
// Presets reproducing the published models.

namespace detail {
inline void require_open_unit(double v, const std::string& name) {
    if (!(v > 0.0) || !(v < 1.0))
        throw std::invalid_argument("preset: " + name + " = " + std::to_string(v) +
                                    " outside (0,1)");
}
inline void require_closed_unit(double v, const std::string& name) {
    if (!(v >= 0.0) || v > 1.0)
        throw std::invalid_argument("preset: " + name + " = " + std::to_string(v) +
                                    " outside [0,1]");
}
}  // namespace detail

/// Constant-continuation browsing: examine[i] = lambda^(i-1). Stored via the
/// stop probability psi = 1 - lambda; no abandonment, grid behavior off.
inline BrowsingConfig preset_geometric(double lambda) {
    detail::require_open_unit(lambda, "lambda");
    return {SelectionModel::constant(1.0 - lambda), AbandonModel::constant(0.0),
            GridBehavior::off()};
}

/// Geometric decay with position-independent selection; computationally the
/// geometric model under another name.
inline BrowsingConfig preset_biega_geometric(double lambda) {
    return preset_geometric(lambda);
}

/// Relevance-gated stopping, no abandonment.
inline BrowsingConfig preset_cascade(double psi_rel, double psi_nonrel) {
    detail::require_closed_unit(psi_rel, "psi_rel");
    detail::require_closed_unit(psi_nonrel, "psi_nonrel");
    return {SelectionModel::binary(psi_rel, psi_nonrel), AbandonModel::constant(0.0),
            GridBehavior::off()};
}

/// Cascade plus a constant per-position abandonment probability.
inline BrowsingConfig preset_extended_cascade(double psi_rel, double psi_nonrel,
                                              double alpha) {
    if (!(alpha >= 0.0) || !(alpha < 1.0))
        throw std::invalid_argument("preset: alpha = " + std::to_string(alpha) +
                                    " outside [0,1)");
    BrowsingConfig config = preset_cascade(psi_rel, psi_nonrel);
    config.abandon = AbandonModel::constant(alpha);
    return config;
}

/// Graded cascade with the standard (2^g - 1) / 2^g_max stop probabilities.
inline BrowsingConfig preset_err_default(int g_max) {
    return {SelectionModel::graded(default_graded_map(g_max)),
            AbandonModel::constant(0.0), GridBehavior::off()};
}

struct PresetInfo {
    std::string name;
    std::string params;
    std::string summary;
};

/// Catalog for CLI listing; names are the `--preset` spellings.
inline const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog = {
        {"geometric", "lambda",
         "constant continuation lambda; the model underlying rank-biased precision"},
        {"biega_geometric", "lambda",
         "geometric decay with equal selection probability per position "
         "(equity-of-attention variant); alias of geometric"},
        {"cascade", "psi_rel, psi_nonrel",
         "relevance-gated stopping; the cascade click model"},
        {"extended_cascade", "psi_rel, psi_nonrel, alpha",
         "cascade plus constant abandonment at every position"},
        {"err_default", "g_max",
         "graded cascade with stop probability (2^g - 1)/2^g_max, as used by "
         "expected reciprocal rank"},
    };
    return catalog;
}

}  // namespace browselab
