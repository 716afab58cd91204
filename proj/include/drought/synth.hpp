#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "drought/dataset.hpp"

namespace drought {

// Synthetic regime: owns a set of DOY intervals and emits Gaussian-perturbed
// weather parameters around per-regime means.
struct RegimeSpec {
    std::string name;
    std::vector<std::pair<int, int>> day_ranges;          // inclusive DOY intervals
    std::array<double, kWeatherParamCount> means{};
    std::array<double, kWeatherParamCount> spreads{};
};

// Three regimes mirroring the monsoon / winter / transitional-dry contrasts:
// wet (days 150-250, GWETTOP ~0.85), winter (1-50 and 251-365, ~0.65),
// dry (51-149, ~0.45).
std::vector<RegimeSpec> default_regimes();

struct SynthResult {
    Dataset dataset;
    std::vector<int> regime_tags;  // ground-truth regime per record, aligned
};

SynthResult generate(int districts, int year_begin, int year_end,
                     const std::vector<RegimeSpec>& regimes, std::uint64_t seed);

// Paper-scale preset: 38 districts, 2012 through partial 2024, ~170k rows.
SynthResult generate_full_scale(std::uint64_t seed);

std::vector<RegimeSpec> load_regime_spec(const std::string& path);
void save_regime_spec(const std::vector<RegimeSpec>& regimes, const std::string& path);

}  // namespace drought
