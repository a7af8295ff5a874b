#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "browselab/config.hpp"
#include "browselab/grid.hpp"
#include "browselab/layout.hpp"
#include "browselab/linear.hpp"
#include "browselab/metrics.hpp"
#include "browselab/simulate.hpp"

namespace browselab {

/// Insertion-ordered JSON so emitted key order is exactly builder order.
using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Deterministic serialization: fixed key order (builder insertion order),
// floating-point numbers rendered with 17 significant digits, two-space
// indentation. Byte-stable across runs and platforms with IEEE doubles.

namespace detail {

inline void append_double(std::string& out, double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument("json output: non-finite number");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

inline void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x",
                                  static_cast<unsigned>(static_cast<unsigned char>(ch)));
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    out += '"';
}

inline void write_json(std::string& out, const json& v, int depth) {
    const auto pad = [&](int d) { out.append(static_cast<std::size_t>(d) * 2, ' '); };
    switch (v.type()) {
        case json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : v.items()) {
                if (!first) out += ",\n";
                first = false;
                pad(depth + 1);
                append_escaped(out, key);
                out += ": ";
                write_json(out, value, depth + 1);
            }
            out += '\n';
            pad(depth);
            out += '}';
            return;
        }
        case json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ",\n";
                pad(depth + 1);
                write_json(out, v[i], depth + 1);
            }
            out += '\n';
            pad(depth);
            out += ']';
            return;
        }
        case json::value_t::string:
            append_escaped(out, v.get_ref<const std::string&>());
            return;
        case json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_unsigned:
            out += std::to_string(v.get<std::uint64_t>());
            return;
        case json::value_t::number_integer:
            out += std::to_string(v.get<std::int64_t>());
            return;
        case json::value_t::number_float:
            append_double(out, v.get<double>());
            return;
        case json::value_t::null:
            out += "null";
            return;
        default:
            throw std::invalid_argument("json output: unsupported value type");
    }
}

}  // namespace detail

inline std::string dump_deterministic(const json& v) {
    std::string out;
    detail::write_json(out, v, 0);
    out += '\n';
    return out;
}

// ---------------------------------------------------------------------------
// Parse helpers. All schema violations throw std::invalid_argument with the
// offending key named; the CLI maps these to exit code 2.

namespace detail {

inline const json& require_field(const json& obj, const char* key, const char* ctx) {
    if (!obj.is_object() || !obj.contains(key))
        throw std::invalid_argument(std::string(ctx) + ": missing required key \"" +
                                    key + "\"");
    return obj.at(key);
}

inline double double_field(const json& obj, const char* key, const char* ctx) {
    const json& v = require_field(obj, key, ctx);
    if (!v.is_number())
        throw std::invalid_argument(std::string(ctx) + ": \"" + key +
                                    "\" must be a number");
    return v.get<double>();
}

inline int int_field(const json& obj, const char* key, const char* ctx) {
    const json& v = require_field(obj, key, ctx);
    if (!v.is_number_integer() && !v.is_number_unsigned())
        throw std::invalid_argument(std::string(ctx) + ": \"" + key +
                                    "\" must be an integer");
    return v.get<int>();
}

inline std::string string_field(const json& obj, const char* key, const char* ctx) {
    const json& v = require_field(obj, key, ctx);
    if (!v.is_string())
        throw std::invalid_argument(std::string(ctx) + ": \"" + key +
                                    "\" must be a string");
    return v.get<std::string>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Layout

inline LayoutKind layout_kind_from_string(const std::string& s) {
    if (s == "linear_vertical") return LayoutKind::LinearVertical;
    if (s == "linear_horizontal") return LayoutKind::LinearHorizontal;
    if (s == "wrapped_grid") return LayoutKind::WrappedGrid;
    if (s == "multi_list") return LayoutKind::MultiList;
    throw std::invalid_argument(
        "layout: unknown kind \"" + s +
        "\" (expected linear_vertical, linear_horizontal, wrapped_grid, multi_list)");
}

/// Accepts {"kind", "row_lengths": [...]} or {"kind", "rows", "cols"} with an
/// optional "total" that shortens the final row.
inline LayoutSpec layout_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("layout: expected an object");
    const LayoutKind kind = layout_kind_from_string(detail::string_field(j, "kind", "layout"));

    if (j.contains("row_lengths")) {
        if (j.contains("rows") || j.contains("cols") || j.contains("total"))
            throw std::invalid_argument(
                "layout: give either \"row_lengths\" or \"rows\"/\"cols\", not both");
        const json& arr = j.at("row_lengths");
        if (!arr.is_array() || arr.empty())
            throw std::invalid_argument("layout: \"row_lengths\" must be a non-empty array");
        std::vector<int> lengths;
        lengths.reserve(arr.size());
        for (const json& e : arr) {
            if (!e.is_number_integer() && !e.is_number_unsigned())
                throw std::invalid_argument("layout: row lengths must be integers");
            lengths.push_back(e.get<int>());
        }
        return LayoutSpec(kind, std::move(lengths));
    }

    const int rows = detail::int_field(j, "rows", "layout");
    const int cols = detail::int_field(j, "cols", "layout");
    std::optional<int> total;
    if (j.contains("total")) total = detail::int_field(j, "total", "layout");
    return LayoutSpec(kind, LayoutSpec::expand(rows, cols, total));
}

/// Canonical form: always the explicit row_lengths array.
inline json layout_to_json(const LayoutSpec& layout) {
    json j;
    j["kind"] = to_string(layout.kind());
    j["row_lengths"] = layout.row_lengths();
    return j;
}

// ---------------------------------------------------------------------------
// Relevance

/// {"grades": [int,...], "g_max": int}; g_max defaults to max(1, max grade).
inline RelevanceVector relevance_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("relevance: expected an object");
    const json& arr = detail::require_field(j, "grades", "relevance");
    if (!arr.is_array() || arr.empty())
        throw std::invalid_argument("relevance: \"grades\" must be a non-empty array");
    std::vector<int> grades;
    grades.reserve(arr.size());
    for (const json& e : arr) {
        if (!e.is_number_integer() && !e.is_number_unsigned())
            throw std::invalid_argument("relevance: grades must be integers");
        grades.push_back(e.get<int>());
    }
    int g_max = 1;
    if (j.contains("g_max")) {
        g_max = detail::int_field(j, "g_max", "relevance");
    } else {
        for (int g : grades) g_max = std::max(g_max, g);
    }
    return RelevanceVector(std::move(grades), g_max);
}

inline json relevance_to_json(const RelevanceVector& relevance) {
    json j;
    j["grades"] = relevance.grades();
    j["g_max"] = relevance.g_max();
    return j;
}

// ---------------------------------------------------------------------------
// Model config

namespace detail {

inline SelectionModel selection_from_json(const json& j) {
    const std::string mode = string_field(j, "mode", "selection");
    if (mode == "constant")
        return SelectionModel::constant(double_field(j, "psi", "selection"));
    if (mode == "binary")
        return SelectionModel::binary(double_field(j, "psi_rel", "selection"),
                                      double_field(j, "psi_nonrel", "selection"));
    if (mode == "graded") {
        const json& map = require_field(j, "grade_map", "selection");
        if (!map.is_object() || map.empty())
            throw std::invalid_argument(
                "selection: \"grade_map\" must be an object {\"0\": p0, ...}");
        std::map<int, double> by_grade;
        for (const auto& [key, value] : map.items()) {
            int g = -1;
            try {
                std::size_t pos = 0;
                g = std::stoi(key, &pos);
                if (pos != key.size()) g = -1;
            } catch (const std::exception&) {
                g = -1;
            }
            if (g < 0)
                throw std::invalid_argument("selection: grade map key \"" + key +
                                            "\" is not a non-negative integer");
            if (!value.is_number())
                throw std::invalid_argument("selection: grade map values must be numbers");
            by_grade[g] = value.get<double>();
        }
        std::vector<double> grade_map(by_grade.rbegin()->first + 1, 0.0);
        for (int g = 0; g < static_cast<int>(grade_map.size()); ++g) {
            const auto it = by_grade.find(g);
            if (it == by_grade.end())
                throw std::invalid_argument("selection: grade map skips grade " +
                                            std::to_string(g));
            grade_map[static_cast<std::size_t>(g)] = it->second;
        }
        return SelectionModel::graded(std::move(grade_map));
    }
    throw std::invalid_argument("selection: unknown mode \"" + mode +
                                "\" (expected constant, binary, graded)");
}

inline AbandonModel abandon_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("abandon: expected an object");
    const bool has_const = j.contains("alpha");
    const bool has_split = j.contains("alpha_rel") || j.contains("alpha_nonrel");
    if (has_const && has_split)
        throw std::invalid_argument(
            "abandon: give either \"alpha\" or \"alpha_rel\"/\"alpha_nonrel\", not both");
    if (has_const) return AbandonModel::constant(double_field(j, "alpha", "abandon"));
    if (has_split)
        return AbandonModel::by_relevance(double_field(j, "alpha_rel", "abandon"),
                                          double_field(j, "alpha_nonrel", "abandon"));
    return AbandonModel::constant(0.0);
}

inline GridBehavior grid_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("grid: expected an object");
    GridBehavior grid = GridBehavior::off();
    if (j.contains("row_skip")) grid.row_skip = double_field(j, "row_skip", "grid");
    if (j.contains("row_decay")) {
        const json& rd = j.at("row_decay");
        const std::string mode = string_field(rd, "mode", "grid.row_decay");
        if (mode == "none") {
            grid.row_decay = RowDecay::none();
        } else if (mode == "beta") {
            grid.row_decay = RowDecay::beta_boost(double_field(rd, "value", "grid.row_decay"));
        } else if (mode == "rho") {
            grid.row_decay =
                RowDecay::row_continuation(double_field(rd, "value", "grid.row_decay"));
        } else {
            throw std::invalid_argument("grid.row_decay: unknown mode \"" + mode +
                                        "\" (expected none, beta, rho)");
        }
    }
    if (j.contains("middle_bias")) {
        const json& mb = j.at("middle_bias");
        const std::string mode = string_field(mb, "mode", "grid.middle_bias");
        if (mode == "none") {
            grid.middle_bias = MiddleBias::none();
        } else if (mode == "gaussian") {
            grid.middle_bias =
                MiddleBias::gaussian(double_field(mb, "sigma", "grid.middle_bias"));
        } else {
            throw std::invalid_argument("grid.middle_bias: unknown mode \"" + mode +
                                        "\" (expected none, gaussian)");
        }
    }
    return grid;
}

}  // namespace detail

/// {"selection": {...}, "abandon": {...}, "grid": {...}}; abandon defaults to
/// never-abandon and grid to all grid behavior off.
inline BrowsingConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("model: expected an object");
    BrowsingConfig config;
    config.selection = detail::selection_from_json(
        detail::require_field(j, "selection", "model"));
    config.abandon = j.contains("abandon") ? detail::abandon_from_json(j.at("abandon"))
                                           : AbandonModel::constant(0.0);
    config.grid = j.contains("grid") ? detail::grid_from_json(j.at("grid"))
                                     : GridBehavior::off();
    return config;
}

/// Canonical emission: all three sections, only the fields the active modes use.
inline json config_to_json(const BrowsingConfig& config) {
    json j;
    json sel;
    switch (config.selection.mode) {
        case SelectionMode::Constant:
            sel["mode"] = "constant";
            sel["psi"] = config.selection.psi;
            break;
        case SelectionMode::BinaryRelevance:
            sel["mode"] = "binary";
            sel["psi_rel"] = config.selection.psi_rel;
            sel["psi_nonrel"] = config.selection.psi_nonrel;
            break;
        case SelectionMode::Graded: {
            sel["mode"] = "graded";
            json map;
            for (std::size_t g = 0; g < config.selection.grade_map.size(); ++g)
                map[std::to_string(g)] = config.selection.grade_map[g];
            sel["grade_map"] = std::move(map);
            break;
        }
    }
    j["selection"] = std::move(sel);

    json ab;
    if (config.abandon.is_constant()) {
        ab["alpha"] = config.abandon.alpha_rel;
    } else {
        ab["alpha_rel"] = config.abandon.alpha_rel;
        ab["alpha_nonrel"] = config.abandon.alpha_nonrel;
    }
    j["abandon"] = std::move(ab);

    json grid;
    grid["row_skip"] = config.grid.row_skip;
    json rd;
    switch (config.grid.row_decay.mode) {
        case RowDecayMode::None:
            rd["mode"] = "none";
            break;
        case RowDecayMode::BetaBoost:
            rd["mode"] = "beta";
            rd["value"] = config.grid.row_decay.value;
            break;
        case RowDecayMode::RowContinuation:
            rd["mode"] = "rho";
            rd["value"] = config.grid.row_decay.value;
            break;
    }
    grid["row_decay"] = std::move(rd);
    json mb;
    if (config.grid.middle_bias.mode == MiddleBiasMode::Gaussian) {
        mb["mode"] = "gaussian";
        mb["sigma"] = config.grid.middle_bias.sigma;
    } else {
        mb["mode"] = "none";
    }
    grid["middle_bias"] = std::move(mb);
    j["grid"] = std::move(grid);
    return j;
}

// ---------------------------------------------------------------------------
// Presets by name (the CLI surface of the preset catalog)

/// Expands a preset name plus named parameters into a full config. Missing
/// parameters take the documented defaults; unknown names or parameters throw.
inline BrowsingConfig preset_by_name(const std::string& name,
                                     const std::map<std::string, double>& params = {}) {
    const auto get = [&](const char* key, double fallback) {
        const auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    const auto reject_unknown = [&](std::initializer_list<const char*> known) {
        for (const auto& [key, value] : params) {
            bool ok = false;
            for (const char* k : known) ok = ok || key == k;
            if (!ok)
                throw std::invalid_argument("preset " + name +
                                            ": unknown parameter \"" + key + "\"");
        }
    };
    if (name == "geometric" || name == "biega_geometric") {
        reject_unknown({"lambda"});
        return preset_geometric(get("lambda", 0.8));
    }
    if (name == "cascade") {
        reject_unknown({"psi_rel", "psi_nonrel"});
        return preset_cascade(get("psi_rel", 0.6), get("psi_nonrel", 0.1));
    }
    if (name == "extended_cascade") {
        reject_unknown({"psi_rel", "psi_nonrel", "alpha"});
        return preset_extended_cascade(get("psi_rel", 0.6), get("psi_nonrel", 0.1),
                                       get("alpha", 0.1));
    }
    if (name == "err_default") {
        reject_unknown({"g_max"});
        const double g = get("g_max", 2.0);
        if (g < 1.0 || g != std::floor(g))
            throw std::invalid_argument("preset err_default: g_max must be an integer >= 1");
        return preset_err_default(static_cast<int>(g));
    }
    throw std::invalid_argument("unknown preset \"" + name +
                                "\" (see the presets list command)");
}

// ---------------------------------------------------------------------------
// Groups

/// Object mapping 1-based rank (as a string key) to a group label.
inline GroupAssignment groups_from_json(const json& j, int n_items) {
    if (!j.is_object() || j.empty())
        throw std::invalid_argument("groups: expected a non-empty object {\"1\": label, ...}");
    std::map<int, std::string> group_of;
    for (const auto& [key, value] : j.items()) {
        int rank = -1;
        try {
            std::size_t pos = 0;
            rank = std::stoi(key, &pos);
            if (pos != key.size()) rank = -1;
        } catch (const std::exception&) {
            rank = -1;
        }
        if (rank < 1 || rank > n_items)
            throw std::invalid_argument("groups: key \"" + key +
                                        "\" is not a rank in [1," +
                                        std::to_string(n_items) + "]");
        if (!value.is_string())
            throw std::invalid_argument("groups: labels must be strings");
        group_of[rank] = value.get<std::string>();
    }
    if (static_cast<int>(group_of.size()) != n_items)
        throw std::invalid_argument("groups: every rank 1.." + std::to_string(n_items) +
                                    " needs a label (got " +
                                    std::to_string(group_of.size()) + ")");
    return GroupAssignment::from_map(std::move(group_of));
}

inline json groups_to_json(const GroupAssignment& groups) {
    json j;
    for (const auto& [rank, label] : groups.group_of) j[std::to_string(rank)] = label;
    return j;
}

// ---------------------------------------------------------------------------
// Run configuration (the CLI input file)

struct SimulationRequest {
    std::int64_t trials = 200000;
    std::uint64_t seed = 0;
};

/// One declarative run: geometry, model, relevance, optional groups, optional
/// simulation settings. Exactly one of an inline model / a preset reference.
struct RunConfig {
    LayoutSpec layout;
    BrowsingConfig model;
    RelevanceVector relevance;
    std::optional<GroupAssignment> groups;
    std::optional<SimulationRequest> simulation;
    std::string preset_name;  ///< non-empty when the model came from a preset
};

inline RunConfig run_config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("run config: expected an object");
    if (j.contains("schema_version")) {
        const json& v = j.at("schema_version");
        if (!v.is_number_integer() && !v.is_number_unsigned())
            throw std::invalid_argument("run config: schema_version must be an integer");
        if (v.get<int>() != kSchemaVersion)
            throw std::invalid_argument("run config: unsupported schema_version " +
                                        std::to_string(v.get<int>()) + " (expected " +
                                        std::to_string(kSchemaVersion) + ")");
    }

    LayoutSpec layout = layout_from_json(detail::require_field(j, "layout", "run config"));
    RelevanceVector relevance =
        relevance_from_json(detail::require_field(j, "relevance", "run config"));
    if (relevance.size() != layout.total_items())
        throw std::invalid_argument(
            "run config: relevance lists " + std::to_string(relevance.size()) +
            " grades but the layout holds " + std::to_string(layout.total_items()) +
            " items");

    const json& model = detail::require_field(j, "model", "run config");
    if (!model.is_object()) throw std::invalid_argument("model: expected an object");
    BrowsingConfig config;
    std::string preset_name;
    if (model.contains("preset")) {
        if (model.contains("selection") || model.contains("abandon") ||
            model.contains("grid"))
            throw std::invalid_argument(
                "model: give either a \"preset\" or an inline model, not both");
        preset_name = detail::string_field(model, "preset", "model");
        std::map<std::string, double> params;
        if (model.contains("params")) {
            const json& p = model.at("params");
            if (!p.is_object())
                throw std::invalid_argument("model: \"params\" must be an object");
            for (const auto& [key, value] : p.items()) {
                if (!value.is_number())
                    throw std::invalid_argument("model: preset parameter \"" + key +
                                                "\" must be a number");
                params[key] = value.get<double>();
            }
        }
        config = preset_by_name(preset_name, params);
    } else {
        config = config_from_json(model);
    }

    std::optional<GroupAssignment> groups;
    if (j.contains("groups"))
        groups = groups_from_json(j.at("groups"), layout.total_items());

    std::optional<SimulationRequest> simulation;
    if (j.contains("simulation")) {
        const json& s = j.at("simulation");
        if (!s.is_object())
            throw std::invalid_argument("simulation: expected an object");
        SimulationRequest req;
        if (s.contains("trials")) {
            const json& t = s.at("trials");
            if (!t.is_number_integer() && !t.is_number_unsigned())
                throw std::invalid_argument("simulation: trials must be an integer");
            req.trials = t.get<std::int64_t>();
            if (req.trials < 1)
                throw std::invalid_argument("simulation: trials must be >= 1");
        }
        if (s.contains("seed")) {
            const json& v = s.at("seed");
            if (!v.is_number_integer() && !v.is_number_unsigned())
                throw std::invalid_argument("simulation: seed must be an integer");
            if (v.is_number_integer() && v.get<std::int64_t>() < 0)
                throw std::invalid_argument("simulation: seed must be >= 0");
            req.seed = v.get<std::uint64_t>();
        }
        simulation = req;
    }

    return RunConfig{std::move(layout), config,          std::move(relevance),
                     std::move(groups), simulation,      std::move(preset_name)};
}

// ---------------------------------------------------------------------------
// Result serialization

inline json profile_to_json(const AttentionProfile& profile) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["examine"] = profile.examine;
    j["select"] = profile.select;
    json totals;
    totals["select"] = profile.total_select;
    totals["abandon"] = profile.total_abandon;
    totals["exhaust"] = profile.total_exhaust;
    j["totals"] = std::move(totals);
    return j;
}

inline json profile_to_json(const GridAttentionProfile& profile) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["examine"] = profile.examine;
    j["select"] = profile.select;
    json totals;
    totals["select"] = profile.total_select;
    totals["abandon"] = profile.total_abandon;
    totals["abandon_cell"] = profile.total_abandon_cell;
    totals["abandon_row"] = profile.total_abandon_row;
    totals["exhaust"] = profile.total_exhaust;
    j["totals"] = std::move(totals);
    json per_row;
    per_row["reach"] = profile.row_reach;
    per_row["skip_probability"] = profile.row_skipped;
    j["per_row"] = std::move(per_row);
    return j;
}

inline json paper_formula_to_json(const PaperFormulaResult& result) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["examine"] = result.examine;
    j["notes"] = result.notes;
    return j;
}

inline json report_to_json(const SimulationReport& report) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["trials"] = report.trials;
    j["seed"] = report.seed;
    j["examined"] = report.examined_count;
    j["selected"] = report.selected_count;
    j["abandoned_cell"] = report.abandoned_cell_count;
    j["abandoned_row"] = report.abandoned_row_count;
    j["skipped"] = report.skipped_count;
    j["exhausted"] = report.exhausted_count;
    return j;
}

inline json verdict_to_json(const ValidationVerdict& verdict, double z_threshold,
                            double abs_floor, std::int64_t trials, std::uint64_t seed) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["pass"] = verdict.pass;
    j["trials"] = trials;
    j["seed"] = seed;
    j["z_threshold"] = z_threshold;
    j["abs_floor"] = abs_floor;
    j["conservation_ok"] = verdict.conservation_ok;
    j["positions_checked"] = verdict.positions_checked;
    j["failures"] = verdict.failures;
    j["worst_z"] = verdict.worst_z;
    j["worst_rank"] = verdict.worst_rank;
    j["worst_quantity"] = verdict.worst_quantity;
    return j;
}

}  // namespace browselab
