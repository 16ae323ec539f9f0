#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "radclass/config.hpp"
#include "radclass/errors.hpp"
#include "radclass/pipeline.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> log_level;
};

radclass::config::PipelineConfig effective_config(const CliOptions& opts, bool need_config) {
    radclass::config::PipelineConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = radclass::config::load_config(opts.config_path);
    } else if (need_config) {
        throw radclass::ConfigError("--config is required for this subcommand");
    }
    if (opts.out_dir) cfg.output_dir = *opts.out_dir;
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.threads) cfg.threads = *opts.threads;
    if (opts.log_level) cfg.log_level = *opts.log_level;
    return cfg;
}

void emit_error(const std::string& kind, const std::string& message) {
    nlohmann::json line = {{"error", kind}, {"message", message}};
    std::cerr << line.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radio-emitter feature extraction, discriminant projection, and "
                 "neighborhood-rough-set attribute reduction"};
    app.require_subcommand(1);
    app.fallthrough(true);  // global flags may follow the subcommand name

    CliOptions opts;
    app.add_option("--config", opts.config_path, "Path to the JSON run configuration");
    app.add_option("--out", opts.out_dir, "Output directory (overrides the config)");
    app.add_option("--seed", opts.seed, "Random seed (overrides the config)");
    app.add_option("--threads", opts.threads, "Worker thread count, 0 = auto (overrides the config)");
    app.add_option("--log-level", opts.log_level, "debug|info|warn|error (overrides the config)");

    auto* cmd_run = app.add_subcommand("run", "Full pipeline: extract, lda-cv, nrs-sweep, evaluate");
    auto* cmd_extract = app.add_subcommand("extract", "Feature extraction stage");
    auto* cmd_lda = app.add_subcommand("lda-cv", "Projection fitting + cross-validation stage");
    auto* cmd_nrs = app.add_subcommand("nrs-sweep", "Attribute importance sweep stage");
    auto* cmd_eval = app.add_subcommand("evaluate", "Reduced-attribute evaluation stage");
    auto* cmd_print = app.add_subcommand("print-config", "Print the effective config (defaults "
                                                         "merged with --config if given)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (cmd_print->parsed()) {
            const auto cfg = effective_config(opts, false);
            std::cout << radclass::config::config_to_json(cfg).dump(2) << "\n";
            return 0;
        }
        const auto cfg = effective_config(opts, true);
        if (cmd_run->parsed()) {
            radclass::pipeline::run_pipeline(cfg);
        } else if (cmd_extract->parsed()) {
            radclass::pipeline::stage_extract(cfg);
        } else if (cmd_lda->parsed()) {
            radclass::pipeline::stage_lda_cv(cfg);
        } else if (cmd_nrs->parsed()) {
            radclass::pipeline::stage_nrs_sweep(cfg);
        } else if (cmd_eval->parsed()) {
            radclass::pipeline::stage_evaluate(cfg);
        }
        return 0;
    } catch (const radclass::ConfigError& e) {
        emit_error("config", e.what());
        return 2;
    } catch (const radclass::MissingArtifactError& e) {
        emit_error("missing_artifact", e.what());
        return 1;
    } catch (const radclass::SchemaError& e) {
        emit_error("schema", e.what());
        return 1;
    } catch (const radclass::Error& e) {
        emit_error("runtime", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
}
