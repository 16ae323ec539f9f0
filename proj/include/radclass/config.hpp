#ifndef RADCLASS_CONFIG_HPP
#define RADCLASS_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radclass/features.hpp"

namespace radclass::config {

/// Synthetic dataset request: per-family recordings at random SNRs drawn
/// uniformly from [snr_db_min, snr_db_max].
struct SyntheticSpec {
    std::vector<std::string> families;  // family names or specific variants
    int per_family = 200;
    std::size_t n_samples = 4096;
    double sample_rate_hz = 1.0e6;
    double snr_db_min = 10.0;
    double snr_db_max = 30.0;
};

struct PipelineConfig {
    // exactly one of the two inputs
    std::optional<std::string> manifest;
    std::optional<SyntheticSpec> synthetic;

    features::FeatureConfig feature;

    std::vector<int> d_range;         // empty = 1..K-1 once K is known
    std::optional<double> epsilon;    // empty = scaled automatically

    std::vector<double> delta_grid;   // default 0.05..0.50 step 0.05
    bool nrs_on_projected = false;    // sweep on LDA coordinates instead of
                                      // standardized features

    int folds = 10;
    int k_final = 4;
    std::string classifier = "centroid";
    int knn_k = 5;
    std::map<std::string, std::string> grouping_overrides;  // label -> category

    std::string output_dir = "out";
    std::uint64_t seed = 42;
    int threads = 0;  // 0 = library default
    std::string log_level = "info";
};

std::vector<double> default_delta_grid();

/// Strict parse: unknown keys anywhere are a config error.
PipelineConfig config_from_json(const nlohmann::json& j);

/// Full echo including defaulted values; inverse of config_from_json.
nlohmann::json config_to_json(const PipelineConfig& cfg);

PipelineConfig load_config(const std::string& path);

/// Consistency checks beyond parsing (input exclusivity, ranges).
void validate(const PipelineConfig& cfg);

/// FNV-1a 64 over the canonical JSON form, excluding fields that do not
/// affect results (output_dir, threads, log_level). Hex string.
std::string config_hash(const PipelineConfig& cfg);

}  // namespace radclass::config

#endif
