#include "radclass/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>

#include "radclass/errors.hpp"

namespace radclass::classify {

namespace {

// Train-split rows for one fold, in original row order.
std::vector<Eigen::Index> split_rows(const FoldAssignment& folds, int fold, bool train) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < folds.fold_of.size(); ++i) {
        const bool in_train = folds.fold_of[i] != fold;
        if (in_train == train) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<Eigen::Index>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

std::vector<int> take_labels(const std::vector<int>& labels, const std::vector<Eigen::Index>& rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (Eigen::Index r : rows) out.push_back(labels[static_cast<std::size_t>(r)]);
    return out;
}

void check_folds(const FoldAssignment& folds, std::size_t m) {
    if (folds.fold_of.size() != m)
        throw DimensionMismatchError("fold assignment does not match sample count");
    if (folds.fold_count < 2) throw InvalidArgumentError("need at least two folds");
    for (int f : folds.fold_of)
        if (f < 0 || f >= folds.fold_count) throw InvalidArgumentError("fold id out of range");
}

void check_train_covers_classes(const std::vector<int>& train_labels, int k, int fold) {
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (int lab : train_labels) seen[static_cast<std::size_t>(lab)] = true;
    for (int j = 0; j < k; ++j) {
        if (!seen[static_cast<std::size_t>(j)])
            throw FoldClassMissingError("train split of fold " + std::to_string(fold) +
                                        " has no samples of class " + std::to_string(j));
    }
}

int predict_with(ClassifierKind kind, const CentroidClassifier& cc, const KnnClassifier& knn,
                 const Eigen::VectorXd& x) {
    return kind == ClassifierKind::kCentroid ? cc.predict(x) : knn.predict(x);
}

// Per-fold evaluation in the standardized (optionally column-restricted)
// raw feature space — the shared path for the baseline and for reduced
// attribute subsets, so "all columns" reproduces the baseline exactly.
struct FlatEval {
    std::vector<double> fold_accuracies;
    std::vector<int> predictions;  // aligned with sample index
    double pooled_accuracy = 0.0;
};

FlatEval evaluate_columns(const Eigen::MatrixXd& raw, const std::vector<int>& labels, int k,
                          const FoldAssignment& folds, const std::vector<int>& attrs,
                          ClassifierKind kind, int knn_k) {
    Eigen::MatrixXd x(raw.rows(), static_cast<Eigen::Index>(attrs.size()));
    for (std::size_t c = 0; c < attrs.size(); ++c)
        x.col(static_cast<Eigen::Index>(c)) = raw.col(attrs[c]);

    FlatEval out;
    out.fold_accuracies.resize(static_cast<std::size_t>(folds.fold_count), 0.0);
    out.predictions.assign(static_cast<std::size_t>(raw.rows()), -1);
    std::size_t correct_total = 0;

    for (int f = 0; f < folds.fold_count; ++f) {
        const auto train_rows = split_rows(folds, f, true);
        const auto test_rows = split_rows(folds, f, false);
        if (test_rows.empty()) continue;
        const Eigen::MatrixXd train_raw = take_rows(x, train_rows);
        const auto train_labels = take_labels(labels, train_rows);
        check_train_covers_classes(train_labels, k, f);

        const auto scaler = features::fit_standardization(train_raw);
        const Eigen::MatrixXd train = features::apply_standardization(train_raw, scaler);
        const Eigen::MatrixXd test = features::apply_standardization(take_rows(x, test_rows), scaler);

        const CentroidClassifier cc = fit_centroid_classifier(train, train_labels);
        KnnClassifier knn;
        if (kind == ClassifierKind::kKnn) knn = KnnClassifier{train, train_labels, knn_k, k};

        std::size_t correct = 0;
        for (std::size_t i = 0; i < test_rows.size(); ++i) {
            const int pred = predict_with(kind, cc, knn, test.row(static_cast<Eigen::Index>(i)).transpose());
            out.predictions[static_cast<std::size_t>(test_rows[i])] = pred;
            if (pred == labels[static_cast<std::size_t>(test_rows[i])]) correct++;
        }
        out.fold_accuracies[static_cast<std::size_t>(f)] =
            static_cast<double>(correct) / static_cast<double>(test_rows.size());
        correct_total += correct;
    }
    out.pooled_accuracy = static_cast<double>(correct_total) / static_cast<double>(raw.rows());
    return out;
}

Eigen::MatrixXi confusion_from(const std::vector<int>& labels, const std::vector<int>& predictions,
                               int k) {
    Eigen::MatrixXi conf = Eigen::MatrixXi::Zero(k, k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (predictions[i] >= 0) conf(labels[i], predictions[i])++;
    }
    return conf;
}

}  // namespace

ClassifierKind classifier_from_name(const std::string& name) {
    if (name == "centroid") return ClassifierKind::kCentroid;
    if (name == "knn") return ClassifierKind::kKnn;
    throw InvalidArgumentError("unknown classifier '" + name + "' (expected centroid or knn)");
}

std::string classifier_name(ClassifierKind kind) {
    return kind == ClassifierKind::kCentroid ? "centroid" : "knn";
}

int CentroidClassifier::predict(const Eigen::VectorXd& x) const {
    if (x.size() != centroids.cols()) throw DimensionMismatchError("query dimension mismatch");
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < centroids.rows(); ++j) {
        const double d2 = (centroids.row(j).transpose() - x).squaredNorm();
        if (d2 < best_d2) {  // strict < keeps the lowest id on ties
            best_d2 = d2;
            best = static_cast<int>(j);
        }
    }
    return best;
}

CentroidClassifier fit_centroid_classifier(const Eigen::MatrixXd& points,
                                           const std::vector<int>& labels) {
    const int k = lda::class_count(labels);
    CentroidClassifier model;
    model.centroids = Eigen::MatrixXd::Zero(k, points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int j = labels[static_cast<std::size_t>(i)];
        model.centroids.row(j) += points.row(i);
        counts[static_cast<std::size_t>(j)]++;
    }
    for (int j = 0; j < k; ++j)
        model.centroids.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);
    return model;
}

CentroidClassifier fit_centroid_classifier(const lda::ReducedDataset& train) {
    return fit_centroid_classifier(train.points, train.labels);
}

int KnnClassifier::predict(const Eigen::VectorXd& x) const {
    if (x.size() != points.cols()) throw DimensionMismatchError("query dimension mismatch");
    const Eigen::Index m = points.rows();
    const int kk = std::min<int>(k, static_cast<int>(m));
    std::vector<std::pair<double, int>> dist;
    dist.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i)
        dist.emplace_back((points.row(i).transpose() - x).squaredNorm(),
                          labels[static_cast<std::size_t>(i)]);
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
    std::vector<int> votes(static_cast<std::size_t>(num_classes), 0);
    for (int i = 0; i < kk; ++i) votes[static_cast<std::size_t>(dist[static_cast<std::size_t>(i)].second)]++;
    int best = 0;
    for (int j = 1; j < num_classes; ++j)
        if (votes[static_cast<std::size_t>(j)] > votes[static_cast<std::size_t>(best)]) best = j;
    return best;
}

FoldModel fit_fold(const Eigen::MatrixXd& raw, const std::vector<int>& labels,
                   const FoldAssignment& folds, int test_fold, int d,
                   std::optional<double> epsilon) {
    check_folds(folds, labels.size());
    if (test_fold < 0 || test_fold >= folds.fold_count)
        throw InvalidArgumentError("test fold out of range");
    const int k = lda::class_count(labels);
    const auto train_rows = split_rows(folds, test_fold, true);
    const Eigen::MatrixXd train_raw = take_rows(raw, train_rows);
    const auto train_labels = take_labels(labels, train_rows);
    check_train_covers_classes(train_labels, k, test_fold);

    FoldModel fm;
    fm.scaler = features::fit_standardization(train_raw);
    const Eigen::MatrixXd train = features::apply_standardization(train_raw, fm.scaler);
    fm.projection = lda::fit(train, train_labels, d, epsilon);
    fm.classifier = fit_centroid_classifier(train * fm.projection.w, train_labels);
    return fm;
}

CVReport cross_validate(const features::LabeledDataset& data, const FoldAssignment& folds,
                        const std::vector<int>& d_range, std::optional<double> epsilon,
                        ClassifierKind kind, int knn_k) {
    const Eigen::MatrixXd& raw = data.raw;
    if (raw.rows() < 1) throw InvalidArgumentError("dataset has no unscaled feature matrix");
    check_folds(folds, static_cast<std::size_t>(raw.rows()));
    const int k = lda::class_count(data.labels);
    if (d_range.empty()) throw InvalidArgumentError("empty projection dimension range");
    for (int d : d_range)
        if (d < 1 || d > k - 1)
            throw InvalidArgumentError("projection dimension " + std::to_string(d) +
                                       " outside [1, " + std::to_string(k - 1) + "]");

    CVReport report;
    report.class_names = data.class_names;
    report.per_dimension.resize(d_range.size());
    // predictions per (d, sample) so the confusion matrix can be assembled
    // for whichever d wins
    std::vector<std::vector<int>> preds(d_range.size(),
                                        std::vector<int>(static_cast<std::size_t>(raw.rows()), -1));
    std::vector<std::vector<std::size_t>> correct(
        d_range.size(), std::vector<std::size_t>(static_cast<std::size_t>(folds.fold_count), 0));
    std::vector<std::vector<std::size_t>> tested(
        d_range.size(), std::vector<std::size_t>(static_cast<std::size_t>(folds.fold_count), 0));

    for (int f = 0; f < folds.fold_count; ++f) {
        const auto train_rows = split_rows(folds, f, true);
        const auto test_rows = split_rows(folds, f, false);
        if (test_rows.empty()) continue;
        const Eigen::MatrixXd train_raw = take_rows(raw, train_rows);
        const auto train_labels = take_labels(data.labels, train_rows);
        check_train_covers_classes(train_labels, k, f);

        const auto scaler = features::fit_standardization(train_raw);
        const Eigen::MatrixXd train = features::apply_standardization(train_raw, scaler);
        const Eigen::MatrixXd test =
            features::apply_standardization(take_rows(raw, test_rows), scaler);

        for (std::size_t di = 0; di < d_range.size(); ++di) {
            const auto model = lda::fit(train, train_labels, d_range[di], epsilon);
            const Eigen::MatrixXd ztr = train * model.w;
            const Eigen::MatrixXd zte = test * model.w;
            const CentroidClassifier cc = fit_centroid_classifier(ztr, train_labels);
            KnnClassifier knn;
            if (kind == ClassifierKind::kKnn) knn = KnnClassifier{ztr, train_labels, knn_k, k};
            for (std::size_t i = 0; i < test_rows.size(); ++i) {
                const int pred =
                    predict_with(kind, cc, knn, zte.row(static_cast<Eigen::Index>(i)).transpose());
                preds[di][static_cast<std::size_t>(test_rows[i])] = pred;
                tested[di][static_cast<std::size_t>(f)]++;
                if (pred == data.labels[static_cast<std::size_t>(test_rows[i])])
                    correct[di][static_cast<std::size_t>(f)]++;
            }
        }
    }

    for (std::size_t di = 0; di < d_range.size(); ++di) {
        auto& res = report.per_dimension[di];
        res.d = d_range[di];
        res.fold_accuracies.resize(static_cast<std::size_t>(folds.fold_count), 0.0);
        std::size_t total_correct = 0, total = 0;
        for (int f = 0; f < folds.fold_count; ++f) {
            const std::size_t fi = static_cast<std::size_t>(f);
            if (tested[di][fi] > 0)
                res.fold_accuracies[fi] = static_cast<double>(correct[di][fi]) /
                                          static_cast<double>(tested[di][fi]);
            total_correct += correct[di][fi];
            total += tested[di][fi];
        }
        res.mean_accuracy = static_cast<double>(total_correct) / static_cast<double>(total);
    }

    // unprojected baseline, shared with evaluate_reduced
    std::vector<int> all_cols(static_cast<std::size_t>(raw.cols()));
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const FlatEval base = evaluate_columns(raw, data.labels, k, folds, all_cols, kind, knn_k);
    report.baseline_accuracy = base.pooled_accuracy;
    report.baseline_fold_accuracies = base.fold_accuracies;

    double best_acc = 0.0;
    for (const auto& res : report.per_dimension) best_acc = std::max(best_acc, res.mean_accuracy);
    std::size_t chosen = 0;
    for (std::size_t di = 0; di < report.per_dimension.size(); ++di) {
        if (report.per_dimension[di].mean_accuracy >= best_acc - 0.01) {
            chosen = di;
            break;
        }
    }
    report.chosen_d = report.per_dimension[chosen].d;
    report.confusion = confusion_from(data.labels, preds[chosen], k);
    return report;
}

MergeResult merge_classes(const lda::ReducedDataset& data, int k_final) {
    const int k = lda::class_count(data.labels);
    if (k_final < 1 || k_final > k)
        throw BadTargetCountError("target class count " + std::to_string(k_final) +
                                  " outside [1, " + std::to_string(k) + "]");

    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, data.points.cols());
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < data.points.rows(); ++i) {
        centroids.row(data.labels[static_cast<std::size_t>(i)]) += data.points.row(i);
        counts[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])]++;
    }
    for (int j = 0; j < k; ++j) centroids.row(j) /= static_cast<double>(counts[static_cast<std::size_t>(j)]);

    auto name_of = [&](int j) {
        return j < static_cast<int>(data.class_names.size()) ? data.class_names[static_cast<std::size_t>(j)]
                                                             : std::to_string(j);
    };

    // clusters stay sorted by smallest member id so pair enumeration (and
    // therefore tie-breaking) is deterministic
    std::vector<std::vector<int>> clusters;
    std::vector<nlohmann::json> trees;
    for (int j = 0; j < k; ++j) {
        clusters.push_back({j});
        trees.push_back(nlohmann::json(name_of(j)));
    }

    auto linkage = [&](const std::vector<int>& a, const std::vector<int>& b) {
        double worst = 0.0;
        for (int ca : a)
            for (int cb : b)
                worst = std::max(worst, (centroids.row(ca) - centroids.row(cb)).norm());
        return worst;
    };

    while (static_cast<int>(clusters.size()) > k_final) {
        std::size_t bi = 0, bj = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double dist = linkage(clusters[i], clusters[j]);
                if (dist < best) {  // strict < keeps the lexicographically first pair
                    best = dist;
                    bi = i;
                    bj = j;
                }
            }
        }
        std::vector<int> merged = clusters[bi];
        merged.insert(merged.end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(merged.begin(), merged.end());
        nlohmann::json tree = nlohmann::json::array({trees[bi], trees[bj]});
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
        trees.erase(trees.begin() + static_cast<std::ptrdiff_t>(bj));
        clusters[bi] = std::move(merged);
        trees[bi] = std::move(tree);
        // restore ordering by smallest member id
        for (std::size_t i = 0; i + 1 < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                if (clusters[j][0] < clusters[i][0]) {
                    std::swap(clusters[i], clusters[j]);
                    std::swap(trees[i], trees[j]);
                }
            }
        }
    }

    MergeResult result;
    result.merged_of.assign(static_cast<std::size_t>(k), -1);
    result.tree = nlohmann::json::array();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        std::string name;
        for (std::size_t t = 0; t < clusters[c].size(); ++t) {
            if (t) name += "+";
            name += name_of(clusters[c][t]);
            result.merged_of[static_cast<std::size_t>(clusters[c][t])] = static_cast<int>(c);
        }
        result.merged_names.push_back(name);
        result.tree.push_back(trees[c]);
    }
    result.relabeled.points = data.points;
    result.relabeled.class_names = result.merged_names;
    result.relabeled.labels.reserve(data.labels.size());
    for (int lab : data.labels)
        result.relabeled.labels.push_back(result.merged_of[static_cast<std::size_t>(lab)]);
    return result;
}

CVReport evaluate_reduced(const features::LabeledDataset& data, const std::vector<int>& attrs,
                          const FoldAssignment& folds, ClassifierKind kind, int knn_k) {
    const Eigen::MatrixXd& raw = data.raw;
    if (raw.rows() < 1) throw InvalidArgumentError("dataset has no unscaled feature matrix");
    check_folds(folds, static_cast<std::size_t>(raw.rows()));
    if (attrs.empty()) throw EmptyAttributeSetError("attribute subset is empty");
    for (int a : attrs)
        if (a < 0 || a >= raw.cols())
            throw InvalidArgumentError("attribute index " + std::to_string(a) + " out of range");
    const int k = lda::class_count(data.labels);

    const FlatEval eval = evaluate_columns(raw, data.labels, k, folds, attrs, kind, knn_k);

    CVReport report;
    report.class_names = data.class_names;
    report.per_dimension.push_back(
        {static_cast<int>(attrs.size()), eval.pooled_accuracy, eval.fold_accuracies});
    report.baseline_accuracy = eval.pooled_accuracy;
    report.baseline_fold_accuracies = eval.fold_accuracies;
    report.chosen_d = static_cast<int>(attrs.size());
    report.confusion = confusion_from(data.labels, eval.predictions, k);
    return report;
}

}  // namespace radclass::classify
