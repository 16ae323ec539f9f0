#ifndef RADCLASS_GROUPING_HPP
#define RADCLASS_GROUPING_HPP

#include <map>
#include <string>

#include "radclass/types.hpp"

namespace radclass {

/// Label-to-class mapping used across the pipeline. The initial grouping
/// defaults to "category = modulation family" (same type, any order); the
/// final map is filled after centroid merging in the reduced space.
struct GroupingMap {
    /// overrides: label name -> category name; labels not listed fall back
    /// to their family
    std::map<std::string, std::string> initial;
    /// category name -> merged class id (empty until merging ran)
    std::map<std::string, int> final_of_category;
    int k_final = 4;

    std::string category_of(const ModulationLabel& label) const {
        auto it = initial.find(label.name);
        return it != initial.end() ? it->second : label.family;
    }
};

}  // namespace radclass

#endif
