#include "radclass/nrs_serial.hpp"

#include <cmath>

#include "radclass/errors.hpp"

namespace radclass::nrs::serial {

namespace {

double subset_distance(const NeighborhoodDecisionSystem& sys, std::size_t i, std::size_t j,
                       const AttributeSubset& b) {
    double acc = 0.0;
    for (int a : b) {
        const double diff = sys.universe(static_cast<Eigen::Index>(i), a) -
                            sys.universe(static_cast<Eigen::Index>(j), a);
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

}  // namespace

std::vector<std::size_t> neighborhood(const NeighborhoodDecisionSystem& sys, std::size_t i,
                                      const AttributeSubset& b) {
    sys.validate();
    if (b.empty()) throw EmptyAttributeSetError("attribute subset is empty");
    if (i >= sys.size()) throw InvalidArgumentError("sample index out of range");
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < sys.size(); ++j)
        if (subset_distance(sys, i, j, b) <= sys.delta) out.push_back(j);
    return out;
}

std::vector<std::size_t> lower_approximation(const NeighborhoodDecisionSystem& sys,
                                             const AttributeSubset& b) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < sys.size(); ++i) {
        bool pure = true;
        for (std::size_t j : serial::neighborhood(sys, i, b)) {
            if (sys.decisions[j] != sys.decisions[i]) {
                pure = false;
                break;
            }
        }
        if (pure) out.push_back(i);
    }
    return out;
}

std::size_t positive_region_count(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b) {
    return serial::lower_approximation(sys, b).size();
}

double dependency(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b) {
    sys.validate();
    if (b.empty()) return 0.0;
    return static_cast<double>(serial::positive_region_count(sys, b)) / static_cast<double>(sys.size());
}

}  // namespace radclass::nrs::serial
