#ifndef RADCLASS_NRS_HPP
#define RADCLASS_NRS_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace radclass::nrs {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite universe with real-valued condition attributes and a dense
/// decision column. Rows are samples; delta is the neighborhood radius
/// under Euclidean distance restricted to a chosen attribute subset.
struct NeighborhoodDecisionSystem {
    RowMatrixXd universe;        // m x n
    std::vector<int> decisions;  // dense ids 0..K-1
    double delta = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(universe.rows()); }
    int attribute_count() const { return static_cast<int>(universe.cols()); }
    void validate() const;
};

using AttributeSubset = std::vector<int>;

/// Indices j with dist_B(x_i, x_j) <= delta, ascending; always contains i.
std::vector<std::size_t> neighborhood(const NeighborhoodDecisionSystem& sys, std::size_t i,
                                      const AttributeSubset& b);

/// Byte mask over the universe: 1 where the sample's neighborhood is
/// contained in its own decision class. OpenMP-parallel over rows.
std::vector<std::uint8_t> positive_region_mask(const NeighborhoodDecisionSystem& sys,
                                               const AttributeSubset& b);

/// Sorted indices of the positive region (union of lower approximations
/// of all decision classes).
std::vector<std::size_t> lower_approximation(const NeighborhoodDecisionSystem& sys,
                                             const AttributeSubset& b);

std::size_t positive_region_count(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b);

/// gamma_B = |POS_B| / |U|. The empty subset has gamma 0 by convention.
double dependency(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b);

/// SIG(a, B) = gamma_{B + a} - gamma_B; requires a outside B.
double significance(const NeighborhoodDecisionSystem& sys, int a, const AttributeSubset& b);

struct ReductReport {
    AttributeSubset selected;         // insertion order, after pruning
    std::vector<double> gamma_trace;  // gamma after each greedy addition
    double gamma_full = 0.0;          // gamma over all attributes
    bool degenerate = false;          // gamma_full == 0: no reduct is meaningful
};

/// Greedy forward selection to full dependency, then backward pruning so
/// no selected attribute is removable without losing dependency.
ReductReport reduce(const NeighborhoodDecisionSystem& sys);

struct SweepReport {
    std::vector<double> delta_grid;
    Eigen::MatrixXd single_attribute_gamma;  // grid rows x attribute cols
    std::vector<ReductReport> reducts;       // one per delta
    AttributeSubset stable_reduct;           // attrs in a strict majority of reducts
};

/// Re-runs single-attribute dependency and the reduct search across a grid
/// of neighborhood radii.
SweepReport importance_sweep(const RowMatrixXd& universe, const std::vector<int>& decisions,
                             const std::vector<double>& delta_grid);

}  // namespace radclass::nrs

#endif
