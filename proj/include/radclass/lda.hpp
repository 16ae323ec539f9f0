#ifndef RADCLASS_LDA_HPP
#define RADCLASS_LDA_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "radclass/features.hpp"

namespace radclass::lda {

struct ClassMeans {
    Eigen::MatrixXd class_means;  // K x n, row j = mean of class j
    Eigen::VectorXd overall_mean;
    std::vector<std::size_t> class_counts;
};

struct ScatterPair {
    Eigen::MatrixXd s_w;  // within-class scatter, n x n
    Eigen::MatrixXd s_b;  // between-class scatter, n x n
    ClassMeans means;
};

/// Fitted projection. Columns of w solve S_B w = lambda (S_W + eps I) w and
/// are (S_W + eps I)-orthonormal; eigenvalues descending; sign fixed so the
/// first component with |value| > 1e-12 is positive.
struct ProjectionModel {
    Eigen::MatrixXd w;  // n x d
    Eigen::VectorXd eigenvalues;
    int d = 0;
    double epsilon = 0.0;
    features::Standardization standardization;  // echo of the dataset scaling
};

struct ReducedDataset {
    Eigen::MatrixXd points;  // m x d
    std::vector<int> labels;
    std::vector<std::string> class_names;

    Eigen::Index rows() const { return points.rows(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }
};

/// Number of classes implied by dense labels; throws EmptyClassError if any
/// id in 0..max is unused.
int class_count(const std::vector<int>& labels);

ClassMeans class_means(const features::LabeledDataset& data);
ClassMeans class_means(const Eigen::MatrixXd& x, const std::vector<int>& labels);

ScatterPair scatter_matrices(const features::LabeledDataset& data);
ScatterPair scatter_matrices(const Eigen::MatrixXd& x, const std::vector<int>& labels);

/// Generalized eigen-solve via Cholesky whitening of S_W + eps I.
/// epsilon empty selects 1e-6 * trace(S_W) / n.
ProjectionModel fit(const features::LabeledDataset& data, int d, std::optional<double> epsilon = {});
ProjectionModel fit(const Eigen::MatrixXd& x, const std::vector<int>& labels, int d,
                    std::optional<double> epsilon = {});

ReducedDataset transform(const ProjectionModel& model, const features::LabeledDataset& data);
Eigen::MatrixXd transform(const ProjectionModel& model, const Eigen::MatrixXd& x);

/// J(W) = prod diag(W' S_B W) / prod diag(W' S_W W).
double objective(const ProjectionModel& model, const ScatterPair& pair);

nlohmann::json model_to_json(const ProjectionModel& model);
ProjectionModel model_from_json(const nlohmann::json& j);

}  // namespace radclass::lda

#endif
