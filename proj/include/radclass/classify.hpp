#ifndef RADCLASS_CLASSIFY_HPP
#define RADCLASS_CLASSIFY_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radclass/features.hpp"
#include "radclass/lda.hpp"
#include "radclass/types.hpp"

namespace radclass::classify {

enum class ClassifierKind { kCentroid, kKnn };

ClassifierKind classifier_from_name(const std::string& name);
std::string classifier_name(ClassifierKind kind);

/// Nearest class-centroid, Euclidean; prediction ties go to the lowest
/// class id.
struct CentroidClassifier {
    Eigen::MatrixXd centroids;  // K x d

    int predict(const Eigen::VectorXd& x) const;
};

CentroidClassifier fit_centroid_classifier(const lda::ReducedDataset& train);
CentroidClassifier fit_centroid_classifier(const Eigen::MatrixXd& points,
                                           const std::vector<int>& labels);

/// k nearest neighbours, majority vote, ties → lowest class id. Kept
/// behind a config switch as a sensitivity check on the centroid choice.
struct KnnClassifier {
    Eigen::MatrixXd points;
    std::vector<int> labels;
    int k = 5;
    int num_classes = 0;

    int predict(const Eigen::VectorXd& x) const;
};

struct DimensionResult {
    int d = 0;
    double mean_accuracy = 0.0;  // pooled: total correct / total evaluated
    std::vector<double> fold_accuracies;
};

struct CVReport {
    std::vector<DimensionResult> per_dimension;
    double baseline_accuracy = 0.0;  // unprojected standardized features
    std::vector<double> baseline_fold_accuracies;
    int chosen_d = 0;
    Eigen::MatrixXi confusion;  // rows true, cols predicted, at chosen_d
    std::vector<std::string> class_names;
};

/// One fold's fitted pieces, exposed so tests can verify that nothing from
/// the test split leaks into the fit.
struct FoldModel {
    features::Standardization scaler;
    lda::ProjectionModel projection;
    CentroidClassifier classifier;
};

FoldModel fit_fold(const Eigen::MatrixXd& raw, const std::vector<int>& labels,
                   const FoldAssignment& folds, int test_fold, int d,
                   std::optional<double> epsilon = {});

/// Stratified k-fold CV over projection dimensions. Operates on the
/// unscaled feature matrix (data.raw); scaling, LDA, and the classifier
/// are refit from the train split of each fold. Also evaluates the
/// unprojected baseline. chosen_d = smallest d whose mean accuracy is
/// within 0.01 of the best.
CVReport cross_validate(const features::LabeledDataset& data, const FoldAssignment& folds,
                        const std::vector<int>& d_range, std::optional<double> epsilon = {},
                        ClassifierKind kind = ClassifierKind::kCentroid, int knn_k = 5);

struct MergeResult {
    std::vector<int> merged_of;  // original class id -> merged id
    lda::ReducedDataset relabeled;
    std::vector<std::string> merged_names;
    nlohmann::json tree;  // nested lists of original class names
};

/// Complete-linkage agglomeration of class centroids in the projected
/// space down to k_final groups. Ties break toward the lexicographically
/// smallest cluster pair, keyed by smallest member id.
MergeResult merge_classes(const lda::ReducedDataset& data, int k_final);

/// Same CV protocol restricted to a column subset of the unscaled
/// features, with no projection step (attrs = all columns reproduces the
/// cross_validate baseline predictions exactly).
CVReport evaluate_reduced(const features::LabeledDataset& data, const std::vector<int>& attrs,
                          const FoldAssignment& folds,
                          ClassifierKind kind = ClassifierKind::kCentroid, int knn_k = 5);

}  // namespace radclass::classify

#endif
