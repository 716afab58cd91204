#include "drought/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <tuple>

#include <json.hpp>

#include "drought/error.hpp"
#include "drought/rng.hpp"

namespace drought {

namespace {

// clamp bounds per parameter: {min, max}; NaN = unbounded
constexpr double kNoBound = std::numeric_limits<double>::quiet_NaN();

std::pair<double, double> param_bounds(int p) {
    switch (p) {
        case 0: return {0.0, kNoBound};    // ALLSKY_SFC_SW_DWN
        case 4: return {0.0, kNoBound};    // QV2M
        case 5: return {0.0, 100.0};       // RH2M
        case 7: return {0.0, kNoBound};    // WS2M
        case 8:
        case 9:
        case 10: return {0.0, 1.0};        // soil wetness fractions
        default: return {kNoBound, kNoBound};
    }
}

double clamp_param(int p, double v) {
    const auto [lo, hi] = param_bounds(p);
    if (!std::isnan(lo)) v = std::max(v, lo);
    if (!std::isnan(hi)) v = std::min(v, hi);
    return v;
}

const RegimeSpec* regime_for_day(const std::vector<RegimeSpec>& regimes, int day,
                                 std::vector<int>* tag) {
    for (std::size_t r = 0; r < regimes.size(); ++r) {
        for (const auto& [a, b] : regimes[r].day_ranges) {
            if (day >= a && day <= b) {
                if (tag) tag->push_back(static_cast<int>(r));
                return &regimes[r];
            }
        }
    }
    return nullptr;
}

SynthResult generate_impl(int districts, int year_begin, int year_end, int last_year_days,
                          const std::vector<RegimeSpec>& regimes, std::uint64_t seed) {
    if (districts < 1) throw ConfigError("district count must be positive");
    if (year_end < year_begin) throw ConfigError("invalid year range");
    if (regimes.empty()) throw ConfigError("no regimes configured");

    // ranges must tile 1..365 without overlap
    std::vector<int> owner(366, -1);
    for (std::size_t r = 0; r < regimes.size(); ++r) {
        for (const auto& [a, b] : regimes[r].day_ranges) {
            if (a < 1 || b > 366 || a > b) throw ConfigError("regime day range outside [1, 366]");
            for (int d = a; d <= b; ++d) {
                if (owner[static_cast<std::size_t>(d)] >= 0) {
                    throw ConfigError("overlapping regime day ranges at day " + std::to_string(d));
                }
                owner[static_cast<std::size_t>(d)] = static_cast<int>(r);
            }
        }
    }
    for (int d = 1; d <= 365; ++d) {
        if (owner[static_cast<std::size_t>(d)] < 0) {
            throw ConfigError("regime day ranges do not cover day " + std::to_string(d));
        }
    }

    Rng master(seed);

    struct Row {
        WeatherRecord rec;
        std::string label;
        int tag;
    };
    std::vector<Row> rows;

    for (int dist = 0; dist < districts; ++dist) {
        Rng rng(master.derive(static_cast<std::uint64_t>(dist)));

        WeatherRecord base;
        base.latitude = 20.6 + 6.0 * rng.uniform();   // within the Bangladesh box
        base.longitude = 88.1 + 4.5 * rng.uniform();

        // per-district bias, small relative to the regime spreads
        std::array<double, kWeatherParamCount> offset{};
        for (int p = 0; p < kWeatherParamCount; ++p) {
            double max_spread = 0.0;
            for (const auto& reg : regimes) {
                max_spread = std::max(max_spread, reg.spreads[static_cast<std::size_t>(p)]);
            }
            offset[static_cast<std::size_t>(p)] = 0.2 * max_spread * rng.normal();
        }

        char label[8];
        std::snprintf(label, sizeof(label), "D%02d", dist);

        for (int year = year_begin; year <= year_end; ++year) {
            int days = is_leap_year(year) ? 366 : 365;
            if (year == year_end && last_year_days > 0) days = std::min(days, last_year_days);
            for (int day = 1; day <= days; ++day) {
                const int lookup = std::min(day, 365);  // leap day follows day 365's regime
                const int tag = owner[static_cast<std::size_t>(lookup)];
                const auto& reg = regimes[static_cast<std::size_t>(tag)];

                Row row;
                row.rec = base;
                row.rec.year = year;
                row.rec.doy = day;
                for (int p = 0; p < kWeatherParamCount; ++p) {
                    const auto ps = static_cast<std::size_t>(p);
                    const double v =
                        reg.means[ps] + offset[ps] + reg.spreads[ps] * rng.normal();
                    set_weather_param(row.rec, p, clamp_param(p, v));
                }
                row.label = label;
                row.tag = tag;
                rows.push_back(std::move(row));
            }
        }
    }

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.rec.latitude, a.rec.longitude, a.rec.year, a.rec.doy) <
               std::tie(b.rec.latitude, b.rec.longitude, b.rec.year, b.rec.doy);
    });

    SynthResult result;
    result.dataset.records.reserve(rows.size());
    for (auto& r : rows) {
        result.dataset.records.push_back(r.rec);
        result.dataset.source_labels.push_back(std::move(r.label));
        result.regime_tags.push_back(r.tag);
    }
    result.dataset.district_count = districts;
    return result;
}

}  // namespace

std::vector<RegimeSpec> default_regimes() {
    // parameter order: ALLSKY, T2M, T2MDEW, TS, QV2M, RH2M, PS, WS2M,
    //                  GWETTOP, GWETROOT, GWETPROF
    RegimeSpec monsoon;
    monsoon.name = "monsoon_wet";
    monsoon.day_ranges = {{150, 250}};
    monsoon.means = {14.0, 28.5, 25.5, 29.0, 19.5, 85.0, 100.4, 4.0, 0.85, 0.82, 0.80};
    monsoon.spreads = {1.5, 1.0, 0.8, 1.0, 1.0, 3.0, 0.15, 0.6, 0.03, 0.03, 0.03};

    RegimeSpec winter;
    winter.name = "winter_cool_dry";
    winter.day_ranges = {{1, 50}, {251, 365}};
    winter.means = {15.0, 18.0, 12.0, 18.5, 9.0, 70.0, 101.5, 1.0, 0.65, 0.63, 0.62};
    winter.spreads = {1.5, 1.2, 1.0, 1.2, 0.8, 3.0, 0.15, 0.4, 0.03, 0.03, 0.03};

    RegimeSpec dry;
    dry.name = "transitional_dry";
    dry.day_ranges = {{51, 149}};
    dry.means = {23.0, 28.0, 16.0, 29.5, 12.0, 42.0, 101.0, 4.0, 0.45, 0.44, 0.43};
    dry.spreads = {1.5, 1.2, 1.0, 1.2, 0.8, 3.0, 0.15, 0.6, 0.03, 0.03, 0.03};

    return {monsoon, winter, dry};
}

SynthResult generate(int districts, int year_begin, int year_end,
                     const std::vector<RegimeSpec>& regimes, std::uint64_t seed) {
    return generate_impl(districts, year_begin, year_end, 0, regimes, seed);
}

SynthResult generate_full_scale(std::uint64_t seed) {
    // 38 districts, full 2012-2023 plus the first 135 days of 2024: ~171k rows
    return generate_impl(38, 2012, 2024, 135, default_regimes(), seed);
}

std::vector<RegimeSpec> load_regime_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open regime spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid regime spec JSON: " + std::string(e.what()));
    }
    std::vector<RegimeSpec> regimes;
    for (const auto& rj : j.at("regimes")) {
        RegimeSpec r;
        r.name = rj.at("name").get<std::string>();
        for (const auto& range : rj.at("day_ranges")) {
            r.day_ranges.emplace_back(range.at(0).get<int>(), range.at(1).get<int>());
        }
        for (int p = 0; p < kWeatherParamCount; ++p) {
            const auto ps = static_cast<std::size_t>(p);
            r.means[ps] = rj.at("means").at(kWeatherParamNames[p]).get<double>();
            r.spreads[ps] = rj.at("spreads").at(kWeatherParamNames[p]).get<double>();
        }
        regimes.push_back(std::move(r));
    }
    return regimes;
}

void save_regime_spec(const std::vector<RegimeSpec>& regimes, const std::string& path) {
    nlohmann::json j;
    j["regimes"] = nlohmann::json::array();
    for (const auto& r : regimes) {
        nlohmann::json rj;
        rj["name"] = r.name;
        rj["day_ranges"] = nlohmann::json::array();
        for (const auto& [a, b] : r.day_ranges) rj["day_ranges"].push_back({a, b});
        for (int p = 0; p < kWeatherParamCount; ++p) {
            const auto ps = static_cast<std::size_t>(p);
            rj["means"][kWeatherParamNames[p]] = r.means[ps];
            rj["spreads"][kWeatherParamNames[p]] = r.spreads[ps];
        }
        j["regimes"].push_back(std::move(rj));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write regime spec: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace drought
