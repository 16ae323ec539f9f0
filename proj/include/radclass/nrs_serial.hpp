#ifndef RADCLASS_NRS_SERIAL_HPP
#define RADCLASS_NRS_SERIAL_HPP

#include "radclass/nrs.hpp"

// Plain single-threaded versions of the neighborhood kernels, kept as a
// reference for correctness tests and the benchmark target. These avoid
// the early-exit distance bound and OpenMP so they stay obviously right.
namespace radclass::nrs::serial {

std::vector<std::size_t> neighborhood(const NeighborhoodDecisionSystem& sys, std::size_t i,
                                      const AttributeSubset& b);

std::vector<std::size_t> lower_approximation(const NeighborhoodDecisionSystem& sys,
                                             const AttributeSubset& b);

std::size_t positive_region_count(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b);

double dependency(const NeighborhoodDecisionSystem& sys, const AttributeSubset& b);

}  // namespace radclass::nrs::serial

#endif
