#include "drought/labeling.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>

#include "drought/error.hpp"

namespace drought {

namespace {

double median_of(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<int> ClusterLabeling::apply_all(const std::vector<int>& raw_assignments) const {
    std::vector<int> out;
    out.reserve(raw_assignments.size());
    for (int a : raw_assignments) out.push_back(apply(a));
    return out;
}

ClusterLabeling canonicalize_labels(const std::vector<int>& assignments, const Dataset& dataset) {
    if (assignments.size() != dataset.records.size()) {
        throw NumericError("assignments not aligned with dataset");
    }
    int k = 0;
    for (int a : assignments) k = std::max(k, a + 1);

    std::vector<std::vector<double>> gwettop(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        gwettop[static_cast<std::size_t>(assignments[i])].push_back(dataset.records[i].gwettop);
    }

    ClusterLabeling labeling;
    labeling.median_gwettop.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        auto& vals = gwettop[static_cast<std::size_t>(c)];
        if (vals.empty()) throw NumericError("empty cluster " + std::to_string(c));
        labeling.median_gwettop[static_cast<std::size_t>(c)] = median_of(vals);
    }

    // rank raw ids by descending median GWETTOP, ties by raw id
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = labeling.median_gwettop[static_cast<std::size_t>(a)];
        const double mb = labeling.median_gwettop[static_cast<std::size_t>(b)];
        if (ma != mb) return ma > mb;
        return a < b;
    });

    labeling.canonical_map.resize(static_cast<std::size_t>(k));
    for (int rank = 0; rank < k; ++rank) {
        labeling.canonical_map[static_cast<std::size_t>(order[static_cast<std::size_t>(rank)])] = rank;
    }
    return labeling;
}

void write_assignments_csv(const Dataset& dataset, const std::vector<int>& canonical,
                           const std::string& path) {
    if (canonical.size() != dataset.records.size()) {
        throw NumericError("assignments not aligned with dataset");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << "DISTRICT,YEAR,DOY,CLUSTER\n";
    for (std::size_t i = 0; i < canonical.size(); ++i) {
        const auto& r = dataset.records[i];
        out << dataset.source_labels[i] << ',' << r.year << ',' << r.doy << ',' << canonical[i]
            << '\n';
    }
}

std::vector<int> read_assignments_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty-input: " + path);
    std::vector<int> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto pos = line.find_last_of(',');
        if (pos == std::string::npos) throw InputError("malformed assignments row in " + path);
        int v = 0;
        const char* b = line.data() + pos + 1;
        const char* e = line.data() + line.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e) throw InputError("malformed cluster id in " + path);
        out.push_back(v);
    }
    return out;
}

}  // namespace drought
