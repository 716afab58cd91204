#pragma once

#include <string>
#include <vector>

#include "drought/dataset.hpp"

namespace drought {

// Canonical relabeling: clusters ranked by descending median surface soil
// wetness (GWETTOP), so canonical id 0 is always the wettest regime.
struct ClusterLabeling {
    std::vector<int> canonical_map;        // raw id -> canonical id (bijection)
    std::vector<double> median_gwettop;    // per raw cluster

    int apply(int raw_id) const { return canonical_map.at(static_cast<std::size_t>(raw_id)); }
    std::vector<int> apply_all(const std::vector<int>& raw_assignments) const;
};

ClusterLabeling canonicalize_labels(const std::vector<int>& assignments,
                                    const Dataset& dataset);

void write_assignments_csv(const Dataset& dataset, const std::vector<int>& canonical,
                           const std::string& path);
std::vector<int> read_assignments_csv(const std::string& path);

}  // namespace drought
