// browselab command-line front end: declarative run configs in, deterministic
// JSON reports out. Exit codes: 0 success, 2 invalid input/config/flags,
// 3 validation failure.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "browselab/browselab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBadInput = 2;
constexpr int kExitValidationFailed = 3;

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("BROWSELAB_LOG");
        if (!env) return LogLevel::Error;
        const std::string v(env);
        if (v == "debug") return LogLevel::Debug;
        if (v == "info") return LogLevel::Info;
        return LogLevel::Error;
    }();
    return level;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::cerr << "[info] " << msg << "\n";
}
void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::cerr << "[debug] " << msg << "\n";
}

browselab::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read input file: " + path);
    return browselab::json::parse(in);  // throws nlohmann parse_error on bad JSON
}

/// Writes to `path`, or to stdout when no path was given.
void write_output(const std::optional<std::string>& path, const std::string& content) {
    if (!path) {
        std::cout << content;
        return;
    }
    std::ofstream out(*path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot write output file: " + *path);
    out << content;
    if (!out) throw std::invalid_argument("cannot write output file: " + *path);
    log_info("wrote " + *path);
}

/// Model-shaping flags shared by the attention and validate commands.
struct ModelFlags {
    std::optional<std::string> preset;
    std::optional<double> lambda, psi, psi_rel, psi_nonrel, alpha;
    std::optional<double> gamma, beta, rho, sigma;
    std::optional<int> g_max;
};

void register_model_flags(CLI::App* cmd, ModelFlags& flags) {
    cmd->add_option("--preset", flags.preset,
                    "replace the input model with a named preset");
    auto* lambda = cmd->add_option("--lambda", flags.lambda,
                                   "continuation probability (stored as psi = 1 - lambda)");
    auto* psi = cmd->add_option("--psi", flags.psi, "constant selection probability");
    auto* psi_rel = cmd->add_option("--psi-rel", flags.psi_rel,
                                    "selection probability at relevant items");
    auto* psi_nonrel = cmd->add_option("--psi-nonrel", flags.psi_nonrel,
                                       "selection probability at non-relevant items");
    cmd->add_option("--alpha", flags.alpha, "abandonment probability after a non-selection");
    cmd->add_option("--gamma", flags.gamma, "probability of skipping an entire row");
    auto* beta = cmd->add_option("--beta", flags.beta,
                                 "per-row boost factor (formula-only beta decay)");
    auto* rho = cmd->add_option("--rho", flags.rho,
                                "row-boundary continuation probability");
    cmd->add_option("--sigma", flags.sigma, "gaussian middle-bias width (in columns)");
    cmd->add_option("--g-max", flags.g_max, "maximum relevance grade for graded presets");
    beta->excludes(rho);
    rho->excludes(beta);
    lambda->excludes(psi);
    lambda->excludes(psi_rel);
    lambda->excludes(psi_nonrel);
    psi->excludes(psi_rel);
    psi->excludes(psi_nonrel);
}

std::map<std::string, double> preset_params(const ModelFlags& flags) {
    std::map<std::string, double> params;
    if (flags.lambda) params["lambda"] = *flags.lambda;
    if (flags.psi_rel) params["psi_rel"] = *flags.psi_rel;
    if (flags.psi_nonrel) params["psi_nonrel"] = *flags.psi_nonrel;
    if (flags.alpha) params["alpha"] = *flags.alpha;
    if (flags.g_max) params["g_max"] = static_cast<double>(*flags.g_max);
    if (flags.psi)
        throw std::invalid_argument(
            "--psi does not parameterize any preset; use --lambda or an inline model");
    return params;
}

/// Applies the flag surface to the model from the input file. With --preset
/// the selection-side flags become preset parameters and replace the model
/// wholesale; without it they override individual fields. Grid-side flags
/// always override.
browselab::BrowsingConfig shape_model(const browselab::BrowsingConfig& from_file,
                                      const ModelFlags& flags) {
    using namespace browselab;
    BrowsingConfig config = from_file;

    if (flags.preset) {
        config = preset_by_name(*flags.preset, preset_params(flags));
    } else {
        if (flags.lambda) config.selection = SelectionModel::constant(1.0 - *flags.lambda);
        if (flags.psi) config.selection = SelectionModel::constant(*flags.psi);
        if (flags.psi_rel || flags.psi_nonrel) {
            if (flags.psi_rel && flags.psi_nonrel) {
                config.selection = SelectionModel::binary(*flags.psi_rel, *flags.psi_nonrel);
            } else if (config.selection.mode == SelectionMode::BinaryRelevance) {
                if (flags.psi_rel) config.selection.psi_rel = *flags.psi_rel;
                if (flags.psi_nonrel) config.selection.psi_nonrel = *flags.psi_nonrel;
            } else {
                throw std::invalid_argument(
                    "overriding only one of --psi-rel/--psi-nonrel requires a binary "
                    "selection model in the input");
            }
        }
        if (flags.alpha) config.abandon = AbandonModel::constant(*flags.alpha);
    }

    if (flags.gamma) config.grid.row_skip = *flags.gamma;
    if (flags.beta) config.grid.row_decay = RowDecay::beta_boost(*flags.beta);
    if (flags.rho) config.grid.row_decay = RowDecay::row_continuation(*flags.rho);
    if (flags.sigma) config.grid.middle_bias = MiddleBias::gaussian(*flags.sigma);
    return config;
}

/// Lists every hard error and advisory warning; returns false on hard errors.
bool report_violations(const browselab::BrowsingConfig& config) {
    const auto violations = browselab::validate_config(config);
    for (const auto& v : violations) {
        const bool error = v.severity == browselab::Violation::Severity::Error;
        std::cerr << (error ? "error: " : "warning: ") << v.message << "\n";
    }
    return !browselab::has_errors(violations);
}

int cmd_attention(const std::string& input_path, const std::optional<std::string>& output_path,
                  const ModelFlags& flags, const std::string& paper_literal) {
    using namespace browselab;
    RunConfig run = run_config_from_json(read_json_file(input_path));
    const BrowsingConfig config = shape_model(run.model, flags);
    if (!report_violations(config)) return kExitBadInput;

    json out;
    if (!paper_literal.empty()) {
        const PaperVariant variant = paper_literal == "slower_decay_beta"
                                         ? PaperVariant::SlowerDecayBeta
                                         : PaperVariant::RowSkipLiteral;
        log_info("computing paper-literal examine profile (" + paper_literal + ")");
        out = paper_formula_to_json(
            paper_formula_examine_prob(variant, config, run.relevance, run.layout));
    } else {
        log_info("computing examine/select closed forms");
        out = profile_to_json(examine_prob_grid(config, run.relevance, run.layout));
    }
    write_output(output_path, dump_deterministic(out));
    return kExitOk;
}

int cmd_metrics(const std::string& input_path, const std::optional<std::string>& output_path,
                const std::string& metric, std::optional<double> lambda,
                std::optional<int> g_max, bool reduce_graded) {
    using namespace browselab;
    RunConfig run = run_config_from_json(read_json_file(input_path));

    json out;
    out["schema_version"] = kSchemaVersion;
    out["metric"] = metric;
    json params;
    if (metric == "rbp") {
        if (!lambda)
            throw std::invalid_argument("metric rbp requires --lambda");
        out["value"] = rbp(run.relevance, *lambda, reduce_graded);
        params["lambda"] = *lambda;
        if (reduce_graded) params["reduce_graded"] = true;
    } else if (metric == "err") {
        const int g = g_max.value_or(run.relevance.g_max());
        out["value"] = err(run.relevance, default_graded_map(g));
        params["g_max"] = g;
    } else if (metric == "exposure") {
        if (!run.groups)
            throw std::invalid_argument(
                "metric exposure requires a \"groups\" map in the input config");
        if (!report_violations(run.model)) return kExitBadInput;
        const auto profile = examine_prob_grid(run.model, run.relevance, run.layout);
        json value;
        for (const auto& [label, exposure] : group_exposure(profile, *run.groups))
            value[label] = exposure;
        out["value"] = std::move(value);
    } else {
        throw std::invalid_argument("unknown metric \"" + metric +
                                    "\" (expected rbp, err, exposure)");
    }
    out["params"] = std::move(params);
    write_output(output_path, dump_deterministic(out));
    return kExitOk;
}

int cmd_validate(const std::string& input_path, const std::optional<std::string>& output_path,
                 const ModelFlags& flags, std::optional<std::int64_t> trials_flag,
                 std::optional<std::uint64_t> seed_flag, double z, double floor,
                 double perturb) {
    using namespace browselab;
    RunConfig run = run_config_from_json(read_json_file(input_path));
    const BrowsingConfig config = shape_model(run.model, flags);
    if (!report_violations(config)) return kExitBadInput;

    const SimulationRequest defaults = run.simulation.value_or(SimulationRequest{});
    const std::int64_t trials = trials_flag.value_or(defaults.trials);
    const std::uint64_t seed = seed_flag.value_or(defaults.seed);

    GridAttentionProfile closed = examine_prob_grid(config, run.relevance, run.layout);
    if (perturb != 0.0) {
        log_info("perturbing closed-form values by " + std::to_string(perturb));
        for (double& v : closed.examine) v = std::clamp(v + perturb, 0.0, 1.0);
        for (double& v : closed.select) v = std::clamp(v + perturb, 0.0, 1.0);
    }

    log_info("simulating " + std::to_string(trials) + " trials, seed " +
             std::to_string(seed));
    const SimulationReport report = simulate(config, run.relevance, run.layout, trials, seed);
    const ValidationVerdict verdict = validate(closed, report, z, floor);
    log_debug("worst |z| = " + std::to_string(verdict.worst_z) + " at rank " +
              std::to_string(verdict.worst_rank));

    write_output(output_path, dump_deterministic(verdict_to_json(verdict, z, floor,
                                                                 trials, seed)));
    return verdict.pass ? kExitOk : kExitValidationFailed;
}

int cmd_presets_list(const std::optional<std::string>& output_path) {
    std::ostringstream out;
    for (const auto& info : browselab::preset_catalog())
        out << info.name << " (" << info.params << "): " << info.summary << "\n";
    write_output(output_path, out.str());
    return kExitOk;
}

int cmd_presets_show(const std::string& name, const ModelFlags& flags,
                     const std::optional<std::string>& output_path) {
    using namespace browselab;
    const BrowsingConfig config = preset_by_name(name, preset_params(flags));
    write_output(output_path, dump_deterministic(config_to_json(config)));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"browsing-model attention profiles, ranking metrics, and "
                 "Monte-Carlo validation"};
    app.require_subcommand(1);

    std::string input_path;
    std::optional<std::string> output_path;
    ModelFlags flags;

    auto* attention = app.add_subcommand(
        "attention", "closed-form examine/select probabilities for a run config");
    attention->add_option("--input", input_path, "run config JSON")->required();
    attention->add_option("--output", output_path, "output path (default: stdout)");
    register_model_flags(attention, flags);
    std::string paper_literal;
    attention->add_option("--paper-literal", paper_literal,
                          "use a published-formula variant as printed")
        ->check(CLI::IsMember({"slower_decay_beta", "row_skip"}));

    auto* metrics = app.add_subcommand("metrics", "ranking metrics over a run config");
    metrics->add_option("--input", input_path, "run config JSON")->required();
    metrics->add_option("--output", output_path, "output path (default: stdout)");
    std::string metric;
    metrics->add_option("--metric", metric, "rbp, err, or exposure")
        ->required()
        ->check(CLI::IsMember({"rbp", "err", "exposure"}));
    std::optional<double> metric_lambda;
    std::optional<int> metric_g_max;
    bool reduce_graded = false;
    metrics->add_option("--lambda", metric_lambda, "rbp persistence parameter");
    metrics->add_option("--g-max", metric_g_max, "grade ceiling for the err stop map");
    metrics->add_flag("--reduce-graded", reduce_graded,
                      "treat graded relevance as binary (grade >= 1) for rbp");

    auto* validate_cmd = app.add_subcommand(
        "validate", "check the closed forms against the stochastic browsing machine");
    validate_cmd->add_option("--input", input_path, "run config JSON")->required();
    validate_cmd->add_option("--output", output_path, "output path (default: stdout)");
    register_model_flags(validate_cmd, flags);
    std::optional<std::int64_t> trials_flag;
    std::optional<std::uint64_t> seed_flag;
    double z = 4.0;
    double floor = 0.005;
    double perturb = 0.0;
    validate_cmd->add_option("--trials", trials_flag, "simulation trials (default 200000)");
    validate_cmd->add_option("--seed", seed_flag, "simulation seed (default 0)");
    validate_cmd->add_option("--z", z, "per-position z threshold (default 4)");
    validate_cmd->add_option("--floor", floor, "absolute tolerance floor (default 0.005)");
    validate_cmd->add_option("--perturb", perturb,
                             "test hook: offset closed-form values before comparing");

    auto* presets = app.add_subcommand("presets", "named model presets");
    presets->require_subcommand(1);
    auto* presets_list = presets->add_subcommand("list", "list preset names");
    presets_list->add_option("--output", output_path, "output path (default: stdout)");
    auto* presets_show =
        presets->add_subcommand("show", "expand a preset to its full model JSON");
    std::string preset_name;
    presets_show->add_option("name", preset_name, "preset name")->required();
    presets_show->add_option("--output", output_path, "output path (default: stdout)");
    register_model_flags(presets_show, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's fine-grained exit codes onto the 0/2/3 contract.
        return app.exit(e) == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (attention->parsed())
            return cmd_attention(input_path, output_path, flags, paper_literal);
        if (metrics->parsed())
            return cmd_metrics(input_path, output_path, metric, metric_lambda,
                               metric_g_max, reduce_graded);
        if (validate_cmd->parsed())
            return cmd_validate(input_path, output_path, flags, trials_flag, seed_flag,
                                z, floor, perturb);
        if (presets_list->parsed()) return cmd_presets_list(output_path);
        if (presets_show->parsed())
            return cmd_presets_show(preset_name, flags, output_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
