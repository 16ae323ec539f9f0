#ifndef RADCLASS_PIPELINE_HPP
#define RADCLASS_PIPELINE_HPP

#include <string>
#include <vector>

#include "radclass/config.hpp"
#include "radclass/signal_io.hpp"

namespace radclass::pipeline {

// artifact file names inside the output directory
inline constexpr const char* kFeaturesCsv = "features.csv";
inline constexpr const char* kFeaturesJson = "features.json";
inline constexpr const char* kCvCurveCsv = "cv_curve.csv";
inline constexpr const char* kCvReportJson = "cv_report.json";
inline constexpr const char* kModelJson = "model.json";
inline constexpr const char* kProjectionCsv = "projection_3d.csv";
inline constexpr const char* kMergeJson = "merge.json";
inline constexpr const char* kImportanceCsv = "importance.csv";
inline constexpr const char* kReductJson = "reduct.json";
inline constexpr const char* kReducedEvalJson = "reduced_eval.json";
inline constexpr const char* kConfusionCsv = "confusion.csv";
inline constexpr const char* kRunManifestJson = "run_manifest.json";

/// Builds the input dataset: loads the manifest or synthesizes the
/// requested families at random SNRs, deterministically from cfg.seed.
std::vector<LabeledRecording> load_input(const config::PipelineConfig& cfg);

/// Stage 1: features.csv + features.json (raw feature values; the sidecar
/// carries the full-dataset scaling, class names, and the config hash).
void stage_extract(const config::PipelineConfig& cfg);

/// Stage 2: cross-validation over projection dimensions plus the final
/// projection/merge artifacts — cv_curve.csv, cv_report.json, model.json,
/// projection_3d.csv, merge.json.
void stage_lda_cv(const config::PipelineConfig& cfg);

/// Stage 3: attribute-importance sweep over the delta grid against the
/// merged classes — importance.csv, reduct.json.
void stage_nrs_sweep(const config::PipelineConfig& cfg);

/// Stage 4: reduced-attribute reclassification — reduced_eval.json,
/// confusion.csv.
void stage_evaluate(const config::PipelineConfig& cfg);

/// All stages in order plus run_manifest.json.
void run_pipeline(const config::PipelineConfig& cfg);

}  // namespace radclass::pipeline

#endif
