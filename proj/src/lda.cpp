#include "radclass/lda.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>

#include "radclass/errors.hpp"

namespace radclass::lda {

int class_count(const std::vector<int>& labels) {
    if (labels.empty()) throw EmptyClassError("no samples, no classes");
    int k = 0;
    for (int lab : labels) {
        if (lab < 0) throw InvalidArgumentError("negative class label");
        k = std::max(k, lab + 1);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int lab : labels) counts[static_cast<std::size_t>(lab)]++;
    for (int j = 0; j < k; ++j) {
        if (counts[static_cast<std::size_t>(j)] == 0)
            throw EmptyClassError("class " + std::to_string(j) + " has no samples");
    }
    return k;
}

ClassMeans class_means(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
    if (static_cast<std::size_t>(x.rows()) != labels.size())
        throw DimensionMismatchError("labels do not match sample count");
    const int k = class_count(labels);
    const Eigen::Index n = x.cols();

    ClassMeans out;
    out.class_means = Eigen::MatrixXd::Zero(k, n);
    out.class_counts.assign(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int j = labels[static_cast<std::size_t>(i)];
        out.class_means.row(j) += x.row(i);
        out.class_counts[static_cast<std::size_t>(j)]++;
    }
    for (int j = 0; j < k; ++j)
        out.class_means.row(j) /= static_cast<double>(out.class_counts[static_cast<std::size_t>(j)]);

    out.overall_mean = x.colwise().mean();
    return out;
}

ClassMeans class_means(const features::LabeledDataset& data) {
    return class_means(data.features, data.labels);
}

ScatterPair scatter_matrices(const Eigen::MatrixXd& x, const std::vector<int>& labels) {
    ScatterPair pair;
    pair.means = class_means(x, labels);
    const Eigen::Index n = x.cols();
    const int k = static_cast<int>(pair.means.class_counts.size());

    pair.s_w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const int j = labels[static_cast<std::size_t>(i)];
        const Eigen::VectorXd diff = x.row(i).transpose() - pair.means.class_means.row(j).transpose();
        pair.s_w.noalias() += diff * diff.transpose();
    }

    pair.s_b = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < k; ++j) {
        const Eigen::VectorXd diff =
            pair.means.class_means.row(j).transpose() - pair.means.overall_mean;
        pair.s_b.noalias() +=
            static_cast<double>(pair.means.class_counts[static_cast<std::size_t>(j)]) * diff *
            diff.transpose();
    }
    return pair;
}

ScatterPair scatter_matrices(const features::LabeledDataset& data) {
    return scatter_matrices(data.features, data.labels);
}

ProjectionModel fit(const Eigen::MatrixXd& x, const std::vector<int>& labels, int d,
                    std::optional<double> epsilon) {
    if (d < 1) throw InvalidArgumentError("projection dimension must be at least 1");
    const ScatterPair pair = scatter_matrices(x, labels);
    const int k = static_cast<int>(pair.means.class_counts.size());
    const Eigen::Index n = x.cols();
    if (d > k - 1)
        throw RankDeficientError("between-class scatter has rank at most " +
                                 std::to_string(k - 1) + ", cannot extract " + std::to_string(d) +
                                 " directions");
    if (d > n) throw RankDeficientError("more directions requested than features");

    double eps;
    if (epsilon) {
        if (*epsilon < 0.0 || !std::isfinite(*epsilon))
            throw InvalidArgumentError("epsilon must be finite and non-negative");
        eps = *epsilon;
    } else {
        eps = 1e-6 * pair.s_w.trace() / static_cast<double>(n);
    }

    Eigen::MatrixXd m = pair.s_w;
    m.diagonal().array() += eps;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw SingularScatterError("within-class scatter (plus epsilon) is not positive definite");

    // Whiten: A = L^{-1} S_B L^{-T} shares eigenvalues with the pencil
    // (S_B, S_W + eps I); eigenvectors map back via w = L^{-T} y.
    const auto l = llt.matrixL();
    Eigen::MatrixXd a = l.solve(pair.s_b);
    a = l.solve(a.transpose()).transpose();
    a = 0.5 * (a + a.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success) throw RankDeficientError("eigen decomposition failed");
    const Eigen::VectorXd evals = es.eigenvalues();  // ascending
    const double lambda_max = std::max(evals(evals.size() - 1), 0.0);

    int significant = 0;
    for (Eigen::Index i = 0; i < evals.size(); ++i)
        if (evals(i) > 1e-9 * lambda_max && evals(i) > 0.0) significant++;
    if (significant < d)
        throw RankDeficientError("only " + std::to_string(significant) +
                                 " significant discriminant directions available");

    ProjectionModel model;
    model.d = d;
    model.epsilon = eps;
    model.w.resize(n, d);
    model.eigenvalues.resize(d);
    for (int c = 0; c < d; ++c) {
        const Eigen::Index idx = evals.size() - 1 - c;
        Eigen::VectorXd w = llt.matrixU().solve(es.eigenvectors().col(idx));
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (std::abs(w(i)) > 1e-12) {
                if (w(i) < 0.0) w = -w;
                break;
            }
        }
        model.w.col(c) = w;
        model.eigenvalues(c) = std::max(evals(idx), 0.0);
    }
    return model;
}

ProjectionModel fit(const features::LabeledDataset& data, int d, std::optional<double> epsilon) {
    ProjectionModel model = fit(data.features, data.labels, d, epsilon);
    model.standardization = data.standardization;
    return model;
}

Eigen::MatrixXd transform(const ProjectionModel& model, const Eigen::MatrixXd& x) {
    if (x.cols() != model.w.rows())
        throw DimensionMismatchError("sample dimension " + std::to_string(x.cols()) +
                                     " does not match model dimension " +
                                     std::to_string(model.w.rows()));
    return x * model.w;
}

ReducedDataset transform(const ProjectionModel& model, const features::LabeledDataset& data) {
    ReducedDataset out;
    out.points = transform(model, data.features);
    out.labels = data.labels;
    out.class_names = data.class_names;
    return out;
}

double objective(const ProjectionModel& model, const ScatterPair& pair) {
    if (model.w.rows() != pair.s_w.rows())
        throw DimensionMismatchError("model and scatter dimensions disagree");
    const Eigen::VectorXd num = (model.w.transpose() * pair.s_b * model.w).diagonal();
    const Eigen::VectorXd den = (model.w.transpose() * pair.s_w * model.w).diagonal();
    double j = 1.0;
    for (Eigen::Index i = 0; i < num.size(); ++i) {
        if (std::abs(den(i)) < 1e-15)
            throw DegenerateDenominatorError("projected within-class variance is numerically zero");
        j *= num(i) / den(i);
    }
    return j;
}

nlohmann::json model_to_json(const ProjectionModel& model) {
    nlohmann::json j;
    j["n"] = model.w.rows();
    j["d"] = model.d;
    j["epsilon"] = model.epsilon;
    j["eigenvalues"] = std::vector<double>(model.eigenvalues.data(),
                                           model.eigenvalues.data() + model.eigenvalues.size());
    // column-major flattening: column c occupies entries [c*n, (c+1)*n)
    std::vector<double> w(model.w.data(), model.w.data() + model.w.size());
    j["w"] = w;
    j["standardization"] = {
        {"mean", std::vector<double>(model.standardization.mean.data(),
                                     model.standardization.mean.data() +
                                         model.standardization.mean.size())},
        {"stddev", std::vector<double>(model.standardization.stddev.data(),
                                       model.standardization.stddev.data() +
                                           model.standardization.stddev.size())}};
    return j;
}

ProjectionModel model_from_json(const nlohmann::json& j) {
    try {
        ProjectionModel model;
        const auto n = j.at("n").get<Eigen::Index>();
        model.d = j.at("d").get<int>();
        model.epsilon = j.at("epsilon").get<double>();
        const auto evals = j.at("eigenvalues").get<std::vector<double>>();
        const auto w = j.at("w").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(evals.size()) != model.d ||
            static_cast<Eigen::Index>(w.size()) != n * model.d)
            throw SchemaError("projection model arrays have inconsistent sizes");
        model.eigenvalues = Eigen::Map<const Eigen::VectorXd>(evals.data(), model.d);
        model.w = Eigen::Map<const Eigen::MatrixXd>(w.data(), n, model.d);
        const auto& s = j.at("standardization");
        const auto mean = s.at("mean").get<std::vector<double>>();
        const auto stddev = s.at("stddev").get<std::vector<double>>();
        if (mean.size() != stddev.size()) throw SchemaError("standardization arrays disagree");
        model.standardization.mean =
            Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        model.standardization.stddev =
            Eigen::Map<const Eigen::VectorXd>(stddev.data(), static_cast<Eigen::Index>(stddev.size()));
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("projection model payload: " + std::string(e.what()));
    }
}

}  // namespace radclass::lda
