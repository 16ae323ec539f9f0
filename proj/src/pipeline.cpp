#include "radclass/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <system_error>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "radclass/classify.hpp"
#include "radclass/csv.hpp"
#include "radclass/errors.hpp"
#include "radclass/features.hpp"
#include "radclass/lda.hpp"
#include "radclass/nrs.hpp"
#include "radclass/rng.hpp"

namespace radclass::pipeline {

namespace {

namespace fs = std::filesystem;

// fixed sub-stream tags so the synthesis, fold, and merged-fold draws stay
// independent of each other under one user seed
constexpr std::uint64_t kStreamSynth = 0x53594e54;
constexpr std::uint64_t kStreamFolds = 0x464f4c44;
constexpr std::uint64_t kStreamMergedFolds = 0x4d464c44;

int level_rank(const std::string& level) {
    if (level == "debug") return 0;
    if (level == "info") return 1;
    if (level == "warn") return 2;
    return 3;
}

void log_info(const config::PipelineConfig& cfg, const std::string& msg) {
    if (level_rank(cfg.log_level) <= 1) std::cerr << "[info] " << msg << "\n";
}

void apply_threads(const config::PipelineConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
}

/// Collects a stage's artifacts as .tmp files and renames them together,
/// so a failing stage leaves no partial outputs behind.
class StageWriter {
public:
    explicit StageWriter(const fs::path& dir) : dir_(dir) { fs::create_directories(dir_); }

    StageWriter(const StageWriter&) = delete;
    StageWriter& operator=(const StageWriter&) = delete;

    ~StageWriter() {
        for (const auto& [tmp, final_path] : staged_) {
            (void)final_path;
            std::error_code ec;
            fs::remove(tmp, ec);
        }
    }

    void add(const std::string& name, const std::string& content) {
        const fs::path tmp = dir_ / (name + std::string(".tmp"));
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.close();
        if (!out) throw Error("write to '" + tmp.string() + "' failed");
        staged_.emplace_back(tmp, dir_ / name);
    }

    void add_json(const std::string& name, const nlohmann::json& j) { add(name, j.dump(2) + "\n"); }

    void commit() {
        for (const auto& [tmp, final_path] : staged_) fs::rename(tmp, final_path);
        staged_.clear();
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

nlohmann::json read_json_artifact(const fs::path& path, const std::string& expected_hash) {
    if (!fs::exists(path)) throw MissingArtifactError("expected artifact '" + path.string() + "'");
    std::ifstream in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("artifact '" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (!expected_hash.empty()) {
        if (!j.contains("config_hash") || !j.at("config_hash").is_string())
            throw SchemaError("artifact '" + path.string() + "' has no config hash");
        if (j.at("config_hash").get<std::string>() != expected_hash)
            throw SchemaError("artifact '" + path.string() +
                              "' was produced under a different config");
    }
    return j;
}

std::vector<double> vectorxd_to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json confusion_to_json(const Eigen::MatrixXi& conf) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < conf.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < conf.cols(); ++c) row.push_back(conf(r, c));
        rows.push_back(row);
    }
    return rows;
}

struct LoadedFeatures {
    features::LabeledDataset data;
    std::vector<std::string> row_labels;  // per-sample modulation names
};

LoadedFeatures read_features(const config::PipelineConfig& cfg) {
    const fs::path dir = cfg.output_dir;
    const std::string hash = config::config_hash(cfg);

    const fs::path csv_path = dir / kFeaturesCsv;
    if (!fs::exists(csv_path))
        throw MissingArtifactError("expected artifact '" + csv_path.string() + "'");
    const csv::Table table = csv::read_file(csv_path.string());
    const nlohmann::json sidecar = read_json_artifact(dir / kFeaturesJson, hash);

    const std::size_t col_label = table.column("label");
    const std::size_t col_class = table.column("class_id");
    std::vector<std::size_t> feature_cols;
    for (const auto& name : features::feature_names()) feature_cols.push_back(table.column(name));

    const std::size_t m = table.rows.size();
    if (sidecar.at("rows").get<std::size_t>() != m)
        throw SchemaError("feature table row count disagrees with its sidecar");

    LoadedFeatures lf;
    lf.data.raw.resize(static_cast<Eigen::Index>(m), features::kFeatureCount);
    lf.data.labels.reserve(m);
    for (std::size_t r = 0; r < m; ++r) {
        const auto& row = table.rows[r];
        lf.row_labels.push_back(row[col_label]);
        lf.data.labels.push_back(static_cast<int>(csv::parse_int(row[col_class])));
        for (int c = 0; c < features::kFeatureCount; ++c)
            lf.data.raw(static_cast<Eigen::Index>(r), c) =
                csv::parse_double(row[feature_cols[static_cast<std::size_t>(c)]]);
    }

    lf.data.class_names = sidecar.at("class_names").get<std::vector<std::string>>();
    const auto& names = features::feature_names();
    lf.data.feature_names.assign(names.begin(), names.end());

    const auto mean = sidecar.at("standardization").at("mean").get<std::vector<double>>();
    const auto stddev = sidecar.at("standardization").at("stddev").get<std::vector<double>>();
    if (mean.size() != static_cast<std::size_t>(features::kFeatureCount) || stddev.size() != mean.size())
        throw SchemaError("standardization arrays have the wrong length");
    lf.data.standardization.mean =
        Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
    lf.data.standardization.stddev =
        Eigen::Map<const Eigen::VectorXd>(stddev.data(), static_cast<Eigen::Index>(stddev.size()));
    lf.data.features = features::apply_standardization(lf.data.raw, lf.data.standardization);

    for (int lab : lf.data.labels)
        if (lab < 0 || lab >= static_cast<int>(lf.data.class_names.size()))
            throw SchemaError("class id out of range in feature table");
    return lf;
}

struct MergeInfo {
    std::vector<int> merged_of;
    std::vector<std::string> merged_names;
    int projection_d = 0;
};

MergeInfo read_merge(const config::PipelineConfig& cfg) {
    const nlohmann::json j =
        read_json_artifact(fs::path(cfg.output_dir) / kMergeJson, config::config_hash(cfg));
    MergeInfo info;
    info.merged_of = j.at("merged_of").get<std::vector<int>>();
    info.merged_names = j.at("merged_names").get<std::vector<std::string>>();
    info.projection_d = j.at("projection_d").get<int>();
    return info;
}

Eigen::MatrixXd read_projection(const config::PipelineConfig& cfg, int d_proj) {
    const fs::path path = fs::path(cfg.output_dir) / kProjectionCsv;
    if (!fs::exists(path)) throw MissingArtifactError("expected artifact '" + path.string() + "'");
    const csv::Table table = csv::read_file(path.string());
    std::vector<std::size_t> cols;
    for (int c = 0; c < d_proj; ++c) cols.push_back(table.column("z" + std::to_string(c + 1)));
    Eigen::MatrixXd z(static_cast<Eigen::Index>(table.rows.size()), d_proj);
    for (std::size_t r = 0; r < table.rows.size(); ++r)
        for (int c = 0; c < d_proj; ++c)
            z(static_cast<Eigen::Index>(r), c) = csv::parse_double(table.rows[r][cols[static_cast<std::size_t>(c)]]);
    return z;
}

std::vector<int> merged_labels_of(const LoadedFeatures& lf, const MergeInfo& merge) {
    std::vector<int> out;
    out.reserve(lf.data.labels.size());
    for (int lab : lf.data.labels) {
        if (lab < 0 || lab >= static_cast<int>(merge.merged_of.size()))
            throw SchemaError("class id outside the merge map");
        out.push_back(merge.merged_of[static_cast<std::size_t>(lab)]);
    }
    return out;
}

}  // namespace

std::vector<LabeledRecording> load_input(const config::PipelineConfig& cfg) {
    if (cfg.manifest) {
        if (!fs::exists(*cfg.manifest))
            throw ConfigError("dataset manifest '" + *cfg.manifest + "' does not exist");
        auto recs = signal_io::load_dataset(*cfg.manifest);
        // synthesized recordings are already unit power; externally recorded
        // ones may carry arbitrary scale, and the features assume unit power
        for (auto& r : recs) r.recording = signal_io::normalize_power(r.recording);
        return recs;
    }

    const config::SyntheticSpec& spec = *cfg.synthetic;
    std::vector<LabeledRecording> out;
    out.reserve(spec.families.size() * static_cast<std::size_t>(spec.per_family));
    const std::uint64_t base = mix_seed(cfg.seed, kStreamSynth);
    std::uint64_t counter = 0;
    for (const auto& family : spec.families) {
        std::vector<std::string> variants;
        try {
            variants = signal_io::family_variants(family);
        } catch (const UnsupportedModulationError& e) {
            throw ConfigError(std::string("synthetic family list: ") + e.what());
        }
        for (int i = 0; i < spec.per_family; ++i) {
            const auto label = signal_io::modulation_by_name(variants[static_cast<std::size_t>(i) % variants.size()]);
            const std::uint64_t rec_seed = mix_seed(base, counter++);
            Rng draw(mix_seed(rec_seed, 0));
            const double snr = draw.uniform(spec.snr_db_min, spec.snr_db_max);
            out.push_back(signal_io::synthesize(label, spec.n_samples, snr, mix_seed(rec_seed, 1)));
            out.back().recording.sample_rate = spec.sample_rate_hz;
        }
    }
    return out;
}

void stage_extract(const config::PipelineConfig& cfg) {
    config::validate(cfg);
    apply_threads(cfg);
    const std::string hash = config::config_hash(cfg);

    const auto recs = load_input(cfg);
    log_info(cfg, "extract: " + std::to_string(recs.size()) + " recordings");

    GroupingMap grouping;
    grouping.initial = cfg.grouping_overrides;
    grouping.k_final = cfg.k_final;
    const features::LabeledDataset ds = features::extract_all(recs, cfg.feature, grouping);

    std::string csv_text;
    {
        std::vector<std::string> header = {"index", "label", "class_id"};
        for (const auto& name : features::feature_names()) header.push_back(name);
        csv_text += csv::format_row(header);
        for (Eigen::Index i = 0; i < ds.rows(); ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            std::vector<std::string> row = {std::to_string(i), recs[si].label.name,
                                            std::to_string(ds.labels[si])};
            for (int c = 0; c < features::kFeatureCount; ++c)
                row.push_back(csv::format_double(ds.raw(i, c)));
            csv_text += csv::format_row(row);
        }
    }

    nlohmann::json sidecar;
    sidecar["version"] = 1;
    sidecar["config_hash"] = hash;
    sidecar["rows"] = static_cast<std::size_t>(ds.rows());
    sidecar["class_names"] = ds.class_names;
    sidecar["feature_names"] = ds.feature_names;
    sidecar["feature_config"] = {{"embed_dim", cfg.feature.embed_dim},
                                 {"fft_size", cfg.feature.fft_size},
                                 {"k_max", cfg.feature.k_max}};
    sidecar["standardization"] = {{"mean", vectorxd_to_std(ds.standardization.mean)},
                                  {"stddev", vectorxd_to_std(ds.standardization.stddev)}};

    StageWriter writer(cfg.output_dir);
    writer.add(kFeaturesCsv, csv_text);
    writer.add_json(kFeaturesJson, sidecar);
    writer.commit();
}

void stage_lda_cv(const config::PipelineConfig& cfg) {
    config::validate(cfg);
    apply_threads(cfg);
    const std::string hash = config::config_hash(cfg);

    const LoadedFeatures lf = read_features(cfg);
    const int k = static_cast<int>(lf.data.class_names.size());
    if (k < 2) throw ValidationError("cross-validation needs at least two classes");

    std::vector<int> d_range = cfg.d_range;
    if (d_range.empty()) {
        for (int d = 1; d <= k - 1; ++d) d_range.push_back(d);
    } else {
        for (int d : d_range)
            if (d > k - 1)
                throw ConfigError("d_range value " + std::to_string(d) + " exceeds K-1 = " +
                                  std::to_string(k - 1));
    }

    const FoldAssignment folds = signal_io::assign_folds(
        static_cast<std::size_t>(lf.data.rows()), lf.data.labels, cfg.folds,
        mix_seed(cfg.seed, kStreamFolds));
    const auto kind = classify::classifier_from_name(cfg.classifier);

    const classify::CVReport report =
        classify::cross_validate(lf.data, folds, d_range, cfg.epsilon, kind, cfg.knn_k);
    log_info(cfg, "lda-cv: chosen d = " + std::to_string(report.chosen_d));

    // final projection + merge on the full dataset
    const lda::ProjectionModel model_chosen = lda::fit(lf.data, report.chosen_d, cfg.epsilon);
    const int d_proj = std::min(3, k - 1);
    const lda::ProjectionModel model_proj =
        d_proj == report.chosen_d ? model_chosen : lda::fit(lf.data, d_proj, cfg.epsilon);
    const lda::ReducedDataset reduced = lda::transform(model_proj, lf.data);
    const int k_final = std::min(cfg.k_final, k);
    const classify::MergeResult merge = classify::merge_classes(reduced, k_final);

    std::string curve;
    {
        std::vector<std::string> header = {"d", "mean_acc"};
        for (int f = 0; f < folds.fold_count; ++f) header.push_back("fold_" + std::to_string(f));
        curve += csv::format_row(header);
        // d = 0 row is the unprojected baseline
        std::vector<std::string> base = {"0", csv::format_double(report.baseline_accuracy)};
        for (double a : report.baseline_fold_accuracies) base.push_back(csv::format_double(a));
        curve += csv::format_row(base);
        for (const auto& res : report.per_dimension) {
            std::vector<std::string> row = {std::to_string(res.d),
                                            csv::format_double(res.mean_accuracy)};
            for (double a : res.fold_accuracies) row.push_back(csv::format_double(a));
            curve += csv::format_row(row);
        }
    }

    nlohmann::json cv_json;
    cv_json["version"] = 1;
    cv_json["config_hash"] = hash;
    cv_json["class_names"] = report.class_names;
    cv_json["chosen_d"] = report.chosen_d;
    cv_json["baseline_accuracy"] = report.baseline_accuracy;
    cv_json["baseline_fold_accuracies"] = report.baseline_fold_accuracies;
    cv_json["per_dimension"] = nlohmann::json::array();
    for (const auto& res : report.per_dimension)
        cv_json["per_dimension"].push_back({{"d", res.d},
                                            {"mean_accuracy", res.mean_accuracy},
                                            {"fold_accuracies", res.fold_accuracies}});
    cv_json["confusion"] = confusion_to_json(report.confusion);

    nlohmann::json model_json = lda::model_to_json(model_chosen);
    model_json["version"] = 1;
    model_json["config_hash"] = hash;

    std::string proj_csv;
    {
        std::vector<std::string> header = {"index", "class_id", "merged_class", "z1", "z2", "z3"};
        proj_csv += csv::format_row(header);
        for (Eigen::Index i = 0; i < reduced.points.rows(); ++i) {
            const std::size_t si = static_cast<std::size_t>(i);
            std::vector<std::string> row = {
                std::to_string(i), std::to_string(lf.data.labels[si]),
                std::to_string(merge.relabeled.labels[si])};
            for (int c = 0; c < 3; ++c)
                row.push_back(csv::format_double(c < d_proj ? reduced.points(i, c) : 0.0));
            proj_csv += csv::format_row(row);
        }
    }

    nlohmann::json merge_json;
    merge_json["version"] = 1;
    merge_json["config_hash"] = hash;
    merge_json["k_final"] = k_final;
    merge_json["projection_d"] = d_proj;
    merge_json["merged_of"] = merge.merged_of;
    merge_json["merged_names"] = merge.merged_names;
    merge_json["tree"] = merge.tree;

    StageWriter writer(cfg.output_dir);
    writer.add(kCvCurveCsv, curve);
    writer.add_json(kCvReportJson, cv_json);
    writer.add_json(kModelJson, model_json);
    writer.add(kProjectionCsv, proj_csv);
    writer.add_json(kMergeJson, merge_json);
    writer.commit();
}

void stage_nrs_sweep(const config::PipelineConfig& cfg) {
    config::validate(cfg);
    apply_threads(cfg);
    const std::string hash = config::config_hash(cfg);

    const LoadedFeatures lf = read_features(cfg);
    const MergeInfo merge = read_merge(cfg);
    const std::vector<int> decisions = merged_labels_of(lf, merge);

    std::vector<std::string> attr_names;
    nrs::RowMatrixXd universe;
    if (cfg.nrs_on_projected) {
        universe = read_projection(cfg, merge.projection_d);
        for (int c = 0; c < merge.projection_d; ++c) attr_names.push_back("z" + std::to_string(c + 1));
    } else {
        universe = lf.data.features;
        attr_names = lf.data.feature_names;
    }

    const nrs::SweepReport sweep = nrs::importance_sweep(universe, decisions, cfg.delta_grid);
    log_info(cfg, "nrs-sweep: " + std::to_string(cfg.delta_grid.size()) + " radii");

    std::string importance;
    {
        std::vector<std::string> header = {"delta"};
        header.insert(header.end(), attr_names.begin(), attr_names.end());
        importance += csv::format_row(header);
        for (std::size_t g = 0; g < sweep.delta_grid.size(); ++g) {
            std::vector<std::string> row = {csv::format_double(sweep.delta_grid[g])};
            for (int a = 0; a < universe.cols(); ++a)
                row.push_back(csv::format_double(
                    sweep.single_attribute_gamma(static_cast<Eigen::Index>(g), a)));
            importance += csv::format_row(row);
        }
    }

    nlohmann::json reduct;
    reduct["version"] = 1;
    reduct["config_hash"] = hash;
    reduct["on_projected"] = cfg.nrs_on_projected;
    reduct["attribute_names"] = attr_names;
    reduct["delta_grid"] = sweep.delta_grid;
    reduct["per_delta"] = nlohmann::json::array();
    for (std::size_t g = 0; g < sweep.reducts.size(); ++g) {
        const auto& r = sweep.reducts[g];
        std::vector<std::string> selected_names;
        for (int a : r.selected) selected_names.push_back(attr_names[static_cast<std::size_t>(a)]);
        reduct["per_delta"].push_back({{"delta", sweep.delta_grid[g]},
                                       {"selected", r.selected},
                                       {"selected_names", selected_names},
                                       {"gamma_trace", r.gamma_trace},
                                       {"gamma_full", r.gamma_full},
                                       {"degenerate", r.degenerate}});
    }
    std::vector<std::string> stable_names;
    for (int a : sweep.stable_reduct) stable_names.push_back(attr_names[static_cast<std::size_t>(a)]);
    reduct["stable_reduct"] = sweep.stable_reduct;
    reduct["stable_reduct_names"] = stable_names;

    StageWriter writer(cfg.output_dir);
    writer.add(kImportanceCsv, importance);
    writer.add_json(kReductJson, reduct);
    writer.commit();
}

void stage_evaluate(const config::PipelineConfig& cfg) {
    config::validate(cfg);
    apply_threads(cfg);
    const std::string hash = config::config_hash(cfg);

    const LoadedFeatures lf = read_features(cfg);
    const MergeInfo merge = read_merge(cfg);
    const nlohmann::json reduct = read_json_artifact(fs::path(cfg.output_dir) / kReductJson, hash);

    features::LabeledDataset data;
    std::vector<std::string> attr_names;
    if (reduct.at("on_projected").get<bool>()) {
        data.raw = read_projection(cfg, merge.projection_d);
        for (int c = 0; c < merge.projection_d; ++c) attr_names.push_back("z" + std::to_string(c + 1));
    } else {
        data.raw = lf.data.raw;
        attr_names = lf.data.feature_names;
    }
    data.labels = merged_labels_of(lf, merge);
    data.class_names = merge.merged_names;

    std::vector<int> attrs = reduct.at("stable_reduct").get<std::vector<int>>();
    const bool stable_empty = attrs.empty();
    if (stable_empty) {
        // no attribute made a majority of reducts; fall back to the full set
        attrs.resize(static_cast<std::size_t>(data.raw.cols()));
        std::iota(attrs.begin(), attrs.end(), 0);
    }

    const FoldAssignment folds = signal_io::assign_folds(
        static_cast<std::size_t>(data.raw.rows()), data.labels, cfg.folds,
        mix_seed(cfg.seed, kStreamMergedFolds));
    const auto kind = classify::classifier_from_name(cfg.classifier);

    const classify::CVReport reduced_report =
        classify::evaluate_reduced(data, attrs, folds, kind, cfg.knn_k);
    std::vector<int> all_attrs(static_cast<std::size_t>(data.raw.cols()));
    std::iota(all_attrs.begin(), all_attrs.end(), 0);
    const classify::CVReport full_report =
        classify::evaluate_reduced(data, all_attrs, folds, kind, cfg.knn_k);
    log_info(cfg, "evaluate: reduced accuracy " + csv::format_double(reduced_report.baseline_accuracy));

    std::vector<std::string> selected_names;
    for (int a : attrs) selected_names.push_back(attr_names[static_cast<std::size_t>(a)]);

    nlohmann::json eval;
    eval["version"] = 1;
    eval["config_hash"] = hash;
    eval["class_names"] = data.class_names;
    eval["attributes"] = attrs;
    eval["attribute_names"] = selected_names;
    eval["stable_reduct_empty"] = stable_empty;
    eval["accuracy"] = reduced_report.baseline_accuracy;
    eval["fold_accuracies"] = reduced_report.baseline_fold_accuracies;
    eval["full_accuracy"] = full_report.baseline_accuracy;
    eval["full_fold_accuracies"] = full_report.baseline_fold_accuracies;
    eval["confusion"] = confusion_to_json(reduced_report.confusion);

    std::string confusion;
    {
        std::vector<std::string> header = {"class"};
        header.insert(header.end(), data.class_names.begin(), data.class_names.end());
        confusion += csv::format_row(header);
        for (Eigen::Index r = 0; r < reduced_report.confusion.rows(); ++r) {
            std::vector<std::string> row = {data.class_names[static_cast<std::size_t>(r)]};
            for (Eigen::Index c = 0; c < reduced_report.confusion.cols(); ++c)
                row.push_back(std::to_string(reduced_report.confusion(r, c)));
            confusion += csv::format_row(row);
        }
    }

    StageWriter writer(cfg.output_dir);
    writer.add_json(kReducedEvalJson, eval);
    writer.add(kConfusionCsv, confusion);
    writer.commit();
}

void run_pipeline(const config::PipelineConfig& cfg) {
    stage_extract(cfg);
    stage_lda_cv(cfg);
    stage_nrs_sweep(cfg);
    stage_evaluate(cfg);

    nlohmann::json manifest;
    manifest["version"] = 1;
    manifest["tool"] = {{"name", "radclass"}, {"version", "1.0.0"}};
    manifest["config"] = config::config_to_json(cfg);
    manifest["config_hash"] = config::config_hash(cfg);
    manifest["seed"] = cfg.seed;
    manifest["artifacts"] = {kFeaturesCsv,    kFeaturesJson, kCvCurveCsv,     kCvReportJson,
                             kModelJson,      kProjectionCsv, kMergeJson,      kImportanceCsv,
                             kReductJson,     kReducedEvalJson, kConfusionCsv};

    StageWriter writer(cfg.output_dir);
    writer.add_json(kRunManifestJson, manifest);
    writer.commit();
}

}  // namespace radclass::pipeline
