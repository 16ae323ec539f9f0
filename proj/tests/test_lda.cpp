#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "radclass/errors.hpp"
#include "radclass/lda.hpp"
#include "radclass/rng.hpp"

using namespace radclass;

namespace {

// labeled gaussian blobs around given centers
struct Blobs {
    Eigen::MatrixXd x;
    std::vector<int> labels;
};

Blobs make_blobs(const Eigen::MatrixXd& centers, int per_class, double sigma, std::uint64_t seed) {
    Rng rng(seed);
    const int k = static_cast<int>(centers.rows());
    const int n = static_cast<int>(centers.cols());
    Blobs b;
    b.x.resize(k * per_class, n);
    b.labels.resize(static_cast<std::size_t>(k * per_class));
    for (int c = 0; c < k; ++c) {
        for (int i = 0; i < per_class; ++i) {
            const int row = c * per_class + i;
            for (int j = 0; j < n; ++j) b.x(row, j) = centers(c, j) + sigma * rng.gaussian();
            b.labels[static_cast<std::size_t>(row)] = c;
        }
    }
    return b;
}

}  // namespace

TEST_CASE("class means and scatters on a worked 1-D example") {
    // two classes on a line: {0, 2} and {4, 6}
    Eigen::MatrixXd x(4, 1);
    x << 0.0, 2.0, 4.0, 6.0;
    const std::vector<int> labels{0, 0, 1, 1};

    const auto means = lda::class_means(x, labels);
    CHECK(means.class_means(0, 0) == doctest::Approx(1.0));
    CHECK(means.class_means(1, 0) == doctest::Approx(5.0));
    CHECK(means.overall_mean(0) == doctest::Approx(3.0));
    CHECK(means.class_counts == std::vector<std::size_t>{2, 2});

    const auto pair = lda::scatter_matrices(x, labels);
    // within: (0-1)^2+(2-1)^2+(4-5)^2+(6-5)^2 = 4
    CHECK(pair.s_w(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    // between: 2*(1-3)^2 + 2*(5-3)^2 = 16
    CHECK(pair.s_b(0, 0) == doctest::Approx(16.0).epsilon(1e-12));

    // with eps = 0 the generalized eigenvalue is S_B/S_W = 4 and J = 4
    const auto model = lda::fit(x, labels, 1, 0.0);
    CHECK(model.eigenvalues(0) == doctest::Approx(4.0).epsilon(1e-9));
    CHECK(lda::objective(model, pair) == doctest::Approx(4.0).epsilon(1e-9));
    // w is (S_W)-orthonormal: w' S_W w = 1 -> w = 1/2
    CHECK(model.w(0, 0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("scatter decomposition S_W + S_B = S_T") {
    Eigen::MatrixXd centers(3, 4);
    centers << 0, 0, 0, 0,
               3, 1, 0, -1,
               -2, 2, 1, 0;
    const auto blobs = make_blobs(centers, 40, 0.7, 11);
    const auto pair = lda::scatter_matrices(blobs.x, blobs.labels);

    Eigen::MatrixXd centered = blobs.x.rowwise() - blobs.x.colwise().mean();
    Eigen::MatrixXd s_t = centered.transpose() * centered;
    const double scale = s_t.norm();
    CHECK((pair.s_w + pair.s_b - s_t).norm() <= 1e-6 * scale);

    SUBCASE("scatters are symmetric PSD") {
        CHECK((pair.s_w - pair.s_w.transpose()).norm() <= 1e-12 * scale);
        CHECK((pair.s_b - pair.s_b.transpose()).norm() <= 1e-12 * scale);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_w(pair.s_w), es_b(pair.s_b);
        CHECK(es_w.eigenvalues().minCoeff() >= -1e-9 * scale);
        CHECK(es_b.eigenvalues().minCoeff() >= -1e-9 * scale);
    }
}

TEST_CASE("fit solves the generalized eigenproblem") {
    Eigen::MatrixXd centers(4, 5);
    centers << 0, 0, 0, 0, 0,
               4, 0, 1, 0, 0,
               0, 4, -1, 0, 0,
               2, 2, 3, 0, 0;
    const auto blobs = make_blobs(centers, 50, 0.9, 23);
    const auto pair = lda::scatter_matrices(blobs.x, blobs.labels);
    const auto model = lda::fit(blobs.x, blobs.labels, 3);

    const Eigen::MatrixXd reg = pair.s_w + model.epsilon * Eigen::MatrixXd::Identity(5, 5);

    SUBCASE("eigen residuals vanish") {
        for (int j = 0; j < model.d; ++j) {
            const Eigen::VectorXd w = model.w.col(j);
            const double lambda = model.eigenvalues(j);
            const double resid = (pair.s_b * w - lambda * (reg * w)).norm();
            CHECK(resid <= 1e-6 * (pair.s_b.norm() * w.norm() + 1e-30));
        }
    }
    SUBCASE("eigenvalues sorted descending and nonnegative") {
        for (int j = 0; j + 1 < model.d; ++j) CHECK(model.eigenvalues(j) >= model.eigenvalues(j + 1));
        CHECK(model.eigenvalues(model.d - 1) >= 0.0);
    }
    SUBCASE("columns are (S_W + eps I)-orthonormal") {
        const Eigen::MatrixXd gram = model.w.transpose() * reg * model.w;
        CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() <= 1e-8);
    }
    SUBCASE("sign convention: first sizable component positive") {
        for (int j = 0; j < model.d; ++j) {
            for (int i = 0; i < model.w.rows(); ++i) {
                if (std::abs(model.w(i, j)) > 1e-12) {
                    CHECK(model.w(i, j) > 0.0);
                    break;
                }
            }
        }
    }
    SUBCASE("deterministic re-fit is bitwise identical") {
        const auto again = lda::fit(blobs.x, blobs.labels, 3);
        CHECK((model.w.array() == again.w.array()).all());
        CHECK((model.eigenvalues.array() == again.eigenvalues.array()).all());
    }
}

TEST_CASE("two separated stripes project onto the separating axis") {
    // classes separated along x_0 only; the discriminant axis should align
    // with e_0 up to the within-whitening distortion
    Eigen::MatrixXd centers(2, 2);
    centers << 0, 0,
               6, 0;
    auto blobs = make_blobs(centers, 200, 1.0, 31);
    const auto model = lda::fit(blobs.x, blobs.labels, 1);
    const Eigen::VectorXd w = model.w.col(0).normalized();
    // cos of the angle to e_0; finite-sample within-scatter anisotropy
    // tilts the axis by a few degrees at 200 points per class
    CHECK(std::abs(w(0)) > 0.99);
}

TEST_CASE("fit agrees with a dense inverse solution in low dimension") {
    Eigen::MatrixXd centers(3, 3);
    centers << 0, 0, 0,
               3, 1, -1,
               1, -2, 2;
    const auto blobs = make_blobs(centers, 60, 0.8, 47);
    const auto pair = lda::scatter_matrices(blobs.x, blobs.labels);
    const double eps = 1e-8;
    const auto model = lda::fit(blobs.x, blobs.labels, 2, eps);

    // oracle: eigenvalues of (S_W + eps I)^{-1} S_B via the symmetric
    // whitened form, eigenvalues only (Jacobi)
    const Eigen::MatrixXd reg = pair.s_w + eps * Eigen::MatrixXd::Identity(3, 3);
    const Eigen::MatrixXd reg_inv_sqrt = [&] {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reg);
        return Eigen::MatrixXd(es.operatorInverseSqrt());
    }();
    const Eigen::MatrixXd sym = reg_inv_sqrt * pair.s_b * reg_inv_sqrt;
    const auto evs = oracle::jacobi_eigenvalues(sym);
    REQUIRE(evs.size() == 3);
    CHECK(model.eigenvalues(0) == doctest::Approx(evs[0]).epsilon(1e-8));
    CHECK(model.eigenvalues(1) == doctest::Approx(evs[1]).epsilon(1e-8));
}

TEST_CASE("projection is invariant to affine feature shifts") {
    // adding a constant to every feature must not change the projection
    // geometry: scatters are translation invariant
    Eigen::MatrixXd centers(3, 4);
    centers << 0, 1, 0, 2,
               2, -1, 1, 0,
               -1, 0, 3, 1;
    const auto blobs = make_blobs(centers, 30, 0.5, 59);
    Eigen::MatrixXd shifted = blobs.x;
    shifted.rowwise() += Eigen::RowVector4d(10.0, -3.0, 7.5, 0.25);

    const auto a = lda::fit(blobs.x, blobs.labels, 2, 1e-9);
    const auto b = lda::fit(shifted, blobs.labels, 2, 1e-9);
    CHECK((a.w - b.w).norm() <= 1e-6 * a.w.norm());
    CHECK((a.eigenvalues - b.eigenvalues).norm() <= 1e-6 * (a.eigenvalues.norm() + 1e-30));
}

TEST_CASE("transform") {
    Eigen::MatrixXd centers(3, 3);
    centers << 0, 0, 0,
               5, 0, 0,
               0, 5, 0;
    const auto blobs = make_blobs(centers, 40, 0.6, 71);
    const auto model = lda::fit(blobs.x, blobs.labels, 2);

    SUBCASE("is exactly x * w") {
        const Eigen::MatrixXd y = lda::transform(model, blobs.x);
        CHECK((y - blobs.x * model.w).norm() == 0.0);
    }
    SUBCASE("rejects width mismatch") {
        Eigen::MatrixXd narrow(4, 2);
        narrow.setZero();
        CHECK_THROWS_AS(lda::transform(model, narrow), DimensionMismatchError);
    }
    SUBCASE("separates classes in the reduced space") {
        // full-rank projection (d = K-1 = n-1 here) keeps the blobs apart:
        // every point is closer to its own projected class mean
        const Eigen::MatrixXd y = lda::transform(model, blobs.x);
        const auto means = lda::class_means(y, blobs.labels);
        int wrong = 0;
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < 3; ++c) {
                const double d2 = (y.row(i).transpose() - means.class_means.row(c).transpose()).squaredNorm();
                if (d2 < best_d) {
                    best_d = d2;
                    best = c;
                }
            }
            if (best != blobs.labels[static_cast<std::size_t>(i)]) ++wrong;
        }
        CHECK(wrong == 0);
    }
}

TEST_CASE("objective dominates random projections") {
    Eigen::MatrixXd centers(3, 6);
    centers.setZero();
    centers(1, 0) = 4.0;
    centers(1, 2) = -2.0;
    centers(2, 1) = 3.0;
    centers(2, 4) = 1.5;
    const auto blobs = make_blobs(centers, 40, 1.0, 83);
    const auto pair = lda::scatter_matrices(blobs.x, blobs.labels);
    const auto model = lda::fit(blobs.x, blobs.labels, 1, 0.0);
    const double j_star = lda::objective(model, pair);

    SUBCASE("objective equals the top eigenvalue for d = 1, eps = 0") {
        CHECK(j_star == doctest::Approx(model.eigenvalues(0)).epsilon(1e-8));
    }
    SUBCASE("no random direction beats the fitted one") {
        Rng rng(123);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd v(6);
            for (int i = 0; i < 6; ++i) v(i) = rng.gaussian();
            const double num = v.dot(pair.s_b * v);
            const double den = v.dot(pair.s_w * v);
            CHECK(num / den <= j_star * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("rank and degeneracy errors") {
    Eigen::MatrixXd centers(3, 4);
    centers << 0, 0, 0, 0,
               2, 0, 0, 0,
               0, 2, 0, 0;
    const auto blobs = make_blobs(centers, 20, 0.4, 97);

    SUBCASE("d above K-1 is rejected") {
        CHECK_THROWS_AS(lda::fit(blobs.x, blobs.labels, 3), RankDeficientError);
        CHECK_THROWS_AS(lda::fit(blobs.x, blobs.labels, 0), InvalidArgumentError);
    }
    SUBCASE("labels with a hole are rejected") {
        std::vector<int> holey = blobs.labels;
        for (auto& l : holey)
            if (l == 1) l = 2;
        // class id 1 unused
        CHECK_THROWS_AS(lda::class_count(holey), EmptyClassError);
    }
    SUBCASE("zero within-scatter with eps = 0 cannot be whitened") {
        // all points identical per class: S_W = 0 exactly
        Eigen::MatrixXd x(4, 2);
        x << 1, 0,
             1, 0,
             3, 2,
             3, 2;
        CHECK_THROWS_AS(lda::fit(x, {0, 0, 1, 1}, 1, 0.0), SingularScatterError);
        // the default epsilon is also zero here (trace S_W = 0)
        CHECK_THROWS_AS(lda::fit(x, {0, 0, 1, 1}, 1), SingularScatterError);
    }
    SUBCASE("a single class offers no discriminant direction") {
        Rng rng(5);
        Eigen::MatrixXd x(10, 2);
        for (int i = 0; i < 10; ++i) {
            x(i, 0) = rng.gaussian();
            x(i, 1) = rng.gaussian();
        }
        CHECK_THROWS_AS(lda::fit(x, std::vector<int>(10, 0), 1), RankDeficientError);
    }
}

TEST_CASE("degenerate objective denominator is reported") {
    // project onto a direction with (numerically) zero within-class spread:
    // one feature is constant inside every class, eps = 0
    Eigen::MatrixXd x(4, 2);
    x << 0, 0,
         0, 1,
         5, 0,
         5, 1;
    const std::vector<int> labels{0, 0, 1, 1};
    // feature 0 is within-constant, feature 1 carries no class information;
    // fitting with eps = 0 fails at the Cholesky, so build the degenerate
    // model through a manual pair instead
    const auto pair = lda::scatter_matrices(x, labels);
    lda::ProjectionModel manual;
    manual.w = Eigen::MatrixXd::Zero(2, 1);
    manual.w(0, 0) = 1.0;  // direction with w' S_W w = 0
    manual.eigenvalues = Eigen::VectorXd::Ones(1);
    manual.d = 1;
    CHECK_THROWS_AS(lda::objective(manual, pair), DegenerateDenominatorError);
}

TEST_CASE("model JSON round trip is bit exact") {
    Eigen::MatrixXd centers(3, 4);
    centers << 0, 0, 1, 0,
               3, 0, 0, 1,
               0, 3, -1, 0;
    const auto blobs = make_blobs(centers, 25, 0.7, 101);
    auto model = lda::fit(blobs.x, blobs.labels, 2);
    model.standardization.mean = Eigen::Vector4d(0.1, -0.2, 0.3, 12.0);
    model.standardization.stddev = Eigen::Vector4d(1.0, 2.0, 0.0, 3.5);

    const auto j = lda::model_to_json(model);
    const auto back = lda::model_from_json(j);
    CHECK(back.d == model.d);
    CHECK(back.epsilon == model.epsilon);
    CHECK((back.w.array() == model.w.array()).all());
    CHECK((back.eigenvalues.array() == model.eigenvalues.array()).all());
    CHECK((back.standardization.mean.array() == model.standardization.mean.array()).all());
    CHECK((back.standardization.stddev.array() == model.standardization.stddev.array()).all());

    SUBCASE("malformed payloads are rejected") {
        auto bad = j;
        bad["w"] = {1.0, 2.0, 3.0};  // wrong element count
        CHECK_THROWS_AS(lda::model_from_json(bad), SchemaError);
        auto missing = j;
        missing.erase("eigenvalues");
        CHECK_THROWS_AS(lda::model_from_json(missing), SchemaError);
    }
}
