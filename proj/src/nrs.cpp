#include "radclass/nrs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "radclass/errors.hpp"

namespace radclass::nrs {

namespace {

void check_subset(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b) {
    if (b.empty()) throw EmptyAttributeSetError("attribute subset is empty");
    std::vector<bool> seen(static_cast<std::size_t>(sys.attribute_count()), false);
    for (int a : b) {
        if (a < 0 || a >= sys.attribute_count())
            throw InvalidArgumentError("attribute index " + std::to_string(a) + " out of range");
        if (seen[static_cast<std::size_t>(a)])
            throw InvalidArgumentError("duplicate attribute index " + std::to_string(a));
        seen[static_cast<std::size_t>(a)] = true;
    }
}

// Squared distance restricted to subset b, bailing out once the bound is
// exceeded (the partial sum only grows).
inline double bounded_dist2(const double* u, std::size_t n, std::size_t i, std::size_t j,
                            const AttributeSubset& b, double bound) {
    const double* ri = u + i * n;
    const double* rj = u + j * n;
    double acc = 0.0;
    for (int a : b) {
        const double diff = ri[static_cast<std::size_t>(a)] - rj[static_cast<std::size_t>(a)];
        acc += diff * diff;
        if (acc > bound) return acc;
    }
    return acc;
}

}  // namespace

void NeighborhoodDecisionSystem::validate() const {
    if (universe.rows() < 1) throw InvalidArgumentError("universe is empty");
    if (universe.cols() < 1) throw InvalidArgumentError("no condition attributes");
    if (decisions.size() != size())
        throw DimensionMismatchError("decision column does not match universe size");
    if (!universe.allFinite()) throw InvalidArgumentError("universe contains non-finite values");
    if (!(delta >= 0.0) || !std::isfinite(delta))
        throw InvalidArgumentError("delta must be finite and non-negative");
    int k = 0;
    for (int d : decisions) {
        if (d < 0) throw InvalidArgumentError("negative decision id");
        k = std::max(k, d + 1);
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (int d : decisions) counts[static_cast<std::size_t>(d)]++;
    for (int j = 0; j < k; ++j)
        if (counts[static_cast<std::size_t>(j)] == 0)
            throw EmptyClassError("decision class " + std::to_string(j) + " has no samples");
}

std::vector<std::size_t> neighborhood(const NeighborhoodDecisionSystem& sys, std::size_t i,
                                      const AttributeSubset& b) {
    sys.validate();
    check_subset(sys, b);
    if (i >= sys.size()) throw InvalidArgumentError("sample index out of range");
    const std::size_t m = sys.size();
    const std::size_t n = static_cast<std::size_t>(sys.attribute_count());
    const double bound = sys.delta * sys.delta;
    const double* u = sys.universe.data();

    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < m; ++j) {
        if (bounded_dist2(u, n, i, j, b, bound) <= bound) out.push_back(j);
    }
    return out;
}

std::vector<std::uint8_t> positive_region_mask(const NeighborhoodDecisionSystem& sys,
                                               const AttributeSubset& b) {
    sys.validate();
    check_subset(sys, b);
    const std::size_t m = sys.size();
    const std::size_t n = static_cast<std::size_t>(sys.attribute_count());
    const double bound = sys.delta * sys.delta;
    const double* u = sys.universe.data();
    const int* dec = sys.decisions.data();

    std::vector<std::uint8_t> mask(m, 0);
    const auto mi = static_cast<std::ptrdiff_t>(m);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < mi; ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const int di = dec[i];
        bool pure = true;
        // only samples of a different class can break purity
        for (std::size_t j = 0; j < m; ++j) {
            if (dec[j] == di) continue;
            if (bounded_dist2(u, n, i, j, b, bound) <= bound) {
                pure = false;
                break;
            }
        }
        mask[i] = pure ? 1 : 0;
    }
    return mask;
}

std::vector<std::size_t> lower_approximation(const NeighborhoodDecisionSystem& sys,
                                             const AttributeSubset& b) {
    const auto mask = positive_region_mask(sys, b);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

std::size_t positive_region_count(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b) {
    const auto mask = positive_region_mask(sys, b);
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

double dependency(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b) {
    sys.validate();
    if (b.empty()) return 0.0;  // gamma over the empty subset is 0 by convention
    return static_cast<double>(positive_region_count(sys, b)) / static_cast<double>(sys.size());
}

double significance(const NeighborhoodDecisionSystem& sys, int a, const AttributeSubset& b) {
    if (a < 0 || a >= sys.attribute_count())
        throw InvalidArgumentError("attribute index " + std::to_string(a) + " out of range");
    if (std::find(b.begin(), b.end(), a) != b.end())
        throw AttributeAlreadyPresentError("attribute " + std::to_string(a) +
                                           " already in the subset");
    AttributeSubset extended = b;
    extended.push_back(a);
    return dependency(sys, extended) - dependency(sys, b);
}

ReductReport reduce(const NeighborhoodDecisionSystem& sys) {
    sys.validate();
    if (sys.size() < 2) throw InvalidArgumentError("need at least two samples to reduce");
    const int n = sys.attribute_count();
    const std::size_t m = sys.size();

    AttributeSubset all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const std::size_t full_count = positive_region_count(sys, all);

    ReductReport report;
    report.gamma_full = static_cast<double>(full_count) / static_cast<double>(m);
    if (full_count == 0) {
        report.degenerate = true;
        return report;
    }

    // Forward pass. Integer positive-region counts keep the comparisons
    // exact. Single-attribute significance can be zero while a joint
    // addition still helps, so the loop runs until full dependency is
    // reached rather than stopping at the first zero-gain step; the
    // backward prune removes anything that turned out to be dead weight.
    std::vector<bool> in_b(static_cast<std::size_t>(n), false);
    AttributeSubset b;
    std::size_t cur = 0;
    while (cur < full_count) {
        int best = -1;
        std::size_t best_count = 0;
        for (int a = 0; a < n; ++a) {
            if (in_b[static_cast<std::size_t>(a)]) continue;
            AttributeSubset cand = b;
            cand.push_back(a);
            const std::size_t cnt = positive_region_count(sys, cand);
            if (best < 0 || cnt > best_count) {  // ties keep the lowest index
                best = a;
                best_count = cnt;
            }
        }
        b.push_back(best);
        in_b[static_cast<std::size_t>(best)] = true;
        cur = best_count;
        report.gamma_trace.push_back(static_cast<double>(cur) / static_cast<double>(m));
    }

    // Backward prune in reverse insertion order; gamma is monotone in the
    // subset, so anything that survives this single pass stays necessary
    // as later candidates are removed.
    for (std::size_t idx = b.size(); idx-- > 0;) {
        AttributeSubset cand;
        cand.reserve(b.size() - 1);
        for (std::size_t t = 0; t < b.size(); ++t)
            if (t != idx) cand.push_back(b[t]);
        const std::size_t cnt = cand.empty() ? 0 : positive_region_count(sys, cand);
        if (cnt == full_count) b.erase(b.begin() + static_cast<std::ptrdiff_t>(idx));
    }

    report.selected = b;
    return report;
}

SweepReport importance_sweep(const RowMatrixXd& universe, const std::vector<int>& decisions,
                             const std::vector<double>& delta_grid) {
    if (delta_grid.empty()) throw InvalidArgumentError("delta grid is empty");
    for (std::size_t g = 0; g < delta_grid.size(); ++g) {
        if (!(delta_grid[g] >= 0.0) || !std::isfinite(delta_grid[g]))
            throw InvalidArgumentError("delta grid values must be finite and non-negative");
        if (g > 0 && delta_grid[g] <= delta_grid[g - 1])
            throw InvalidArgumentError("delta grid must be strictly increasing");
    }

    NeighborhoodDecisionSystem sys{universe, decisions, 0.0};
    sys.validate();
    const int n = sys.attribute_count();

    SweepReport report;
    report.delta_grid = delta_grid;
    report.single_attribute_gamma.resize(static_cast<Eigen::Index>(delta_grid.size()), n);
    report.reducts.reserve(delta_grid.size());

    for (std::size_t g = 0; g < delta_grid.size(); ++g) {
        sys.delta = delta_grid[g];
        for (int a = 0; a < n; ++a)
            report.single_attribute_gamma(static_cast<Eigen::Index>(g), a) =
                dependency(sys, AttributeSubset{a});
        report.reducts.push_back(reduce(sys));
    }

    std::vector<std::size_t> votes(static_cast<std::size_t>(n), 0);
    for (const auto& r : report.reducts)
        for (int a : r.selected) votes[static_cast<std::size_t>(a)]++;
    for (int a = 0; a < n; ++a)
        if (2 * votes[static_cast<std::size_t>(a)] > delta_grid.size())
            report.stable_reduct.push_back(a);
    return report;
}

}  // namespace radclass::nrs
