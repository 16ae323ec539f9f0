#include "radclass/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "radclass/errors.hpp"

namespace radclass::config {

namespace {

void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void read_if(const nlohmann::json& obj, const char* key, T& out) {
    if (obj.contains(key)) {
        try {
            out = obj.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
        }
    }
}

}  // namespace

std::vector<double> default_delta_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 20.0);
    return grid;
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config root must be an object");
    reject_unknown(j, {"input", "features", "lda", "nrs", "classify", "output_dir", "seed",
                       "threads", "log_level"},
                   "config root");

    PipelineConfig cfg;
    cfg.delta_grid = default_delta_grid();

    if (j.contains("input")) {
        const auto& in = j.at("input");
        if (!in.is_object()) throw ConfigError("'input' must be an object");
        reject_unknown(in, {"manifest", "synthetic"}, "input");
        if (in.contains("manifest")) {
            std::string path;
            read_if(in, "manifest", path);
            cfg.manifest = path;
        }
        if (in.contains("synthetic")) {
            const auto& syn = in.at("synthetic");
            if (!syn.is_object()) throw ConfigError("'input.synthetic' must be an object");
            reject_unknown(syn,
                           {"families", "per_family", "n_samples", "sample_rate_hz", "snr_db_min",
                            "snr_db_max"},
                           "input.synthetic");
            SyntheticSpec spec;
            read_if(syn, "families", spec.families);
            read_if(syn, "per_family", spec.per_family);
            read_if(syn, "n_samples", spec.n_samples);
            read_if(syn, "sample_rate_hz", spec.sample_rate_hz);
            read_if(syn, "snr_db_min", spec.snr_db_min);
            read_if(syn, "snr_db_max", spec.snr_db_max);
            cfg.synthetic = spec;
        }
    }

    if (j.contains("features")) {
        const auto& f = j.at("features");
        if (!f.is_object()) throw ConfigError("'features' must be an object");
        reject_unknown(f, {"embed_dim", "fft_size", "k_max"}, "features");
        read_if(f, "embed_dim", cfg.feature.embed_dim);
        read_if(f, "fft_size", cfg.feature.fft_size);
        read_if(f, "k_max", cfg.feature.k_max);
    }

    if (j.contains("lda")) {
        const auto& l = j.at("lda");
        if (!l.is_object()) throw ConfigError("'lda' must be an object");
        reject_unknown(l, {"d_range", "epsilon"}, "lda");
        read_if(l, "d_range", cfg.d_range);
        if (l.contains("epsilon")) {
            double eps = 0.0;
            read_if(l, "epsilon", eps);
            cfg.epsilon = eps;
        }
    }

    if (j.contains("nrs")) {
        const auto& nrs = j.at("nrs");
        if (!nrs.is_object()) throw ConfigError("'nrs' must be an object");
        reject_unknown(nrs, {"delta_grid", "on_projected"}, "nrs");
        read_if(nrs, "delta_grid", cfg.delta_grid);
        read_if(nrs, "on_projected", cfg.nrs_on_projected);
    }

    if (j.contains("classify")) {
        const auto& c = j.at("classify");
        if (!c.is_object()) throw ConfigError("'classify' must be an object");
        reject_unknown(c, {"folds", "k_final", "classifier", "knn_k", "grouping_overrides"},
                       "classify");
        read_if(c, "folds", cfg.folds);
        read_if(c, "k_final", cfg.k_final);
        read_if(c, "classifier", cfg.classifier);
        read_if(c, "knn_k", cfg.knn_k);
        read_if(c, "grouping_overrides", cfg.grouping_overrides);
    }

    read_if(j, "output_dir", cfg.output_dir);
    read_if(j, "seed", cfg.seed);
    read_if(j, "threads", cfg.threads);
    read_if(j, "log_level", cfg.log_level);
    return cfg;
}

nlohmann::json config_to_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    nlohmann::json input = nlohmann::json::object();
    if (cfg.manifest) input["manifest"] = *cfg.manifest;
    if (cfg.synthetic) {
        input["synthetic"] = {{"families", cfg.synthetic->families},
                              {"per_family", cfg.synthetic->per_family},
                              {"n_samples", cfg.synthetic->n_samples},
                              {"sample_rate_hz", cfg.synthetic->sample_rate_hz},
                              {"snr_db_min", cfg.synthetic->snr_db_min},
                              {"snr_db_max", cfg.synthetic->snr_db_max}};
    }
    j["input"] = input;
    j["features"] = {{"embed_dim", cfg.feature.embed_dim},
                     {"fft_size", cfg.feature.fft_size},
                     {"k_max", cfg.feature.k_max}};
    j["lda"] = nlohmann::json::object();
    j["lda"]["d_range"] = cfg.d_range;
    if (cfg.epsilon) j["lda"]["epsilon"] = *cfg.epsilon;
    j["nrs"] = {{"delta_grid", cfg.delta_grid}, {"on_projected", cfg.nrs_on_projected}};
    j["classify"] = {{"folds", cfg.folds},
                     {"k_final", cfg.k_final},
                     {"classifier", cfg.classifier},
                     {"knn_k", cfg.knn_k},
                     {"grouping_overrides", cfg.grouping_overrides}};
    j["output_dir"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    j["log_level"] = cfg.log_level;
    return j;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

void validate(const PipelineConfig& cfg) {
    const bool has_manifest = cfg.manifest.has_value();
    const bool has_synth = cfg.synthetic.has_value();
    if (has_manifest == has_synth)
        throw ConfigError("exactly one of input.manifest and input.synthetic must be set");
    if (has_synth) {
        if (cfg.synthetic->families.empty()) throw ConfigError("synthetic families list is empty");
        if (cfg.synthetic->per_family < 1) throw ConfigError("per_family must be positive");
        if (cfg.synthetic->n_samples < kMinRecordingLength)
            throw ConfigError("n_samples below the minimum recording length");
        if (!(cfg.synthetic->sample_rate_hz > 0.0))
            throw ConfigError("sample_rate_hz must be positive");
        if (cfg.synthetic->snr_db_min > cfg.synthetic->snr_db_max)
            throw ConfigError("snr_db_min exceeds snr_db_max");
    }
    if (cfg.feature.embed_dim < 2) throw ConfigError("embed_dim must be at least 2");
    if (cfg.feature.fft_size < 8 || (cfg.feature.fft_size & (cfg.feature.fft_size - 1)) != 0)
        throw ConfigError("fft_size must be a power of two, at least 8");
    if (cfg.feature.k_max < 2) throw ConfigError("k_max must be at least 2");
    for (int d : cfg.d_range)
        if (d < 1) throw ConfigError("d_range values must be positive");
    if (cfg.epsilon && (!(std::isfinite(*cfg.epsilon)) || *cfg.epsilon < 0.0))
        throw ConfigError("epsilon must be finite and non-negative");
    if (cfg.delta_grid.empty()) throw ConfigError("delta_grid is empty");
    for (std::size_t i = 0; i < cfg.delta_grid.size(); ++i) {
        if (!(cfg.delta_grid[i] >= 0.0) || !std::isfinite(cfg.delta_grid[i]))
            throw ConfigError("delta_grid values must be finite and non-negative");
        if (i > 0 && cfg.delta_grid[i] <= cfg.delta_grid[i - 1])
            throw ConfigError("delta_grid must be strictly increasing");
    }
    if (cfg.folds < 2) throw ConfigError("folds must be at least 2");
    if (cfg.k_final < 1) throw ConfigError("k_final must be at least 1");
    if (cfg.classifier != "centroid" && cfg.classifier != "knn")
        throw ConfigError("classifier must be 'centroid' or 'knn'");
    if (cfg.knn_k < 1) throw ConfigError("knn_k must be at least 1");
    if (cfg.threads < 0) throw ConfigError("threads must be non-negative");
    if (cfg.log_level != "debug" && cfg.log_level != "info" && cfg.log_level != "warn" &&
        cfg.log_level != "error")
        throw ConfigError("log_level must be one of debug|info|warn|error");
}

std::string config_hash(const PipelineConfig& cfg) {
    nlohmann::json j = config_to_json(cfg);
    j.erase("output_dir");
    j.erase("threads");
    j.erase("log_level");
    const std::string canon = j.dump();  // nlohmann orders object keys

    std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64 offset basis
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ull;  // FNV prime
    }
    char buf[17];
    static const char* hex = "0123456789abcdef";
    for (int i = 15; i >= 0; --i) {
        buf[i] = hex[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

}  // namespace radclass::config
