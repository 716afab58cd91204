#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>

#include "drought/dataset.hpp"
#include "drought/error.hpp"
#include "drought/synth.hpp"

using namespace drought;

TEST_CASE("row count covers every district-day including the 2024 leap day") {
    auto synth = generate(2, 2023, 2024, default_regimes(), 1);
    CHECK(synth.dataset.size() == 2 * (365 + 366));
    CHECK(synth.regime_tags.size() == synth.dataset.size());
    CHECK(synth.dataset.district_count == 2);
}

TEST_CASE("full-scale preset lands near 171k rows") {
    auto synth = generate_full_scale(42);
    // 38 districts x (12 full years incl. leap days + 135 days of 2024)
    const std::size_t days = 12 * 365 + 3 + 135;
    CHECK(synth.dataset.size() == 38 * days);
    CHECK(synth.dataset.size() > 170000);
    CHECK(synth.dataset.district_count == 38);
}

TEST_CASE("tags follow the regime day ranges") {
    auto synth = generate(1, 2022, 2022, default_regimes(), 5);
    for (std::size_t i = 0; i < synth.dataset.size(); ++i) {
        const int doy = synth.dataset.records[i].doy;
        int expect = 1;  // winter covers 1-50 and 251-365
        if (doy >= 150 && doy <= 250) expect = 0;
        else if (doy >= 51 && doy <= 149) expect = 2;
        CHECK(synth.regime_tags[i] == expect);
    }
}

TEST_CASE("generated rows always pass validation") {
    auto synth = generate(4, 2022, 2023, default_regimes(), 9);
    for (const auto& r : synth.dataset.records) {
        CHECK(hard_violation(r).empty());
        CHECK(soft_violation(r).empty());
    }
}

TEST_CASE("bounded parameters stay in range even with extreme seeds") {
    for (std::uint64_t seed : {0ull, 1ull, 77ull, 123456789ull}) {
        auto synth = generate(3, 2022, 2022, default_regimes(), seed);
        for (const auto& r : synth.dataset.records) {
            CHECK(r.rh2m >= 0.0);
            CHECK(r.rh2m <= 100.0);
            CHECK(r.gwettop >= 0.0);
            CHECK(r.gwettop <= 1.0);
            CHECK(r.gwetroot >= 0.0);
            CHECK(r.gwetroot <= 1.0);
            CHECK(r.ws2m >= 0.0);
            CHECK(r.qv2m >= 0.0);
        }
    }
}

TEST_CASE("same seed reproduces the dataset exactly, different seeds do not") {
    auto a = generate(2, 2022, 2022, default_regimes(), 11);
    auto b = generate(2, 2022, 2022, default_regimes(), 11);
    auto c = generate(2, 2022, 2022, default_regimes(), 12);
    REQUIRE(a.dataset.size() == b.dataset.size());
    bool all_equal = true;
    bool any_diff_c = false;
    for (std::size_t i = 0; i < a.dataset.size(); ++i) {
        for (int p = 0; p < kWeatherParamCount; ++p) {
            if (weather_param(a.dataset.records[i], p) !=
                weather_param(b.dataset.records[i], p)) {
                all_equal = false;
            }
            if (weather_param(a.dataset.records[i], p) !=
                weather_param(c.dataset.records[i], p)) {
                any_diff_c = true;
            }
        }
    }
    CHECK(all_equal);
    CHECK(any_diff_c);
}

TEST_CASE("district coordinates are distinct and inside the bounding box") {
    auto synth = generate(6, 2022, 2022, default_regimes(), 21);
    std::set<std::pair<double, double>> coords;
    for (std::size_t i = 0; i < synth.dataset.size(); ++i) {
        const auto& r = synth.dataset.records[i];
        coords.insert({r.latitude, r.longitude});
        CHECK(r.latitude >= 20.5);
        CHECK(r.latitude <= 26.7);
        CHECK(r.longitude >= 88.0);
        CHECK(r.longitude <= 92.7);
    }
    CHECK(coords.size() == 6);
}

TEST_CASE("regime specs must tile the year") {
    auto regimes = default_regimes();
    regimes[0].day_ranges = {{150, 240}};  // leaves 241-249 uncovered
    CHECK_THROWS_AS(generate(1, 2022, 2022, regimes, 0), ConfigError);
    regimes = default_regimes();
    regimes[2].day_ranges = {{40, 149}};  // overlaps winter
    CHECK_THROWS_AS(generate(1, 2022, 2022, regimes, 0), ConfigError);
    CHECK_THROWS_AS(generate(0, 2022, 2022, default_regimes(), 0), ConfigError);
    CHECK_THROWS_AS(generate(1, 2023, 2022, default_regimes(), 0), ConfigError);
}

TEST_CASE("regime spec JSON round-trips") {
    namespace fs = std::filesystem;
    const auto path = (fs::temp_directory_path() / "drought_regimes.json").string();
    save_regime_spec(default_regimes(), path);
    auto back = load_regime_spec(path);
    auto ref = default_regimes();
    REQUIRE(back.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(back[i].name == ref[i].name);
        CHECK(back[i].day_ranges == ref[i].day_ranges);
        CHECK(back[i].means == ref[i].means);
        CHECK(back[i].spreads == ref[i].spreads);
    }
    fs::remove(path);
}
