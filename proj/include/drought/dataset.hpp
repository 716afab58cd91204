#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace drought {

// One district-day observation: the 11 weather parameters plus identifiers.
struct WeatherRecord {
    double latitude = 0.0;   // degrees north
    double longitude = 0.0;  // degrees east
    int year = 0;
    int doy = 0;  // day of year, 1-366

    double allsky_sfc_sw_dwn = 0.0;  // MJ/m^2/day
    double t2m = 0.0;                // deg C
    double t2mdew = 0.0;             // deg C
    double ts = 0.0;                 // deg C
    double qv2m = 0.0;               // g/kg
    double rh2m = 0.0;               // percent
    double ps = 0.0;                 // kPa
    double ws2m = 0.0;               // m/s
    double gwettop = 0.0;            // fraction
    double gwetroot = 0.0;           // fraction
    double gwetprof = 0.0;           // fraction
};

inline constexpr int kWeatherParamCount = 11;

inline constexpr std::array<const char*, kWeatherParamCount> kWeatherParamNames = {
    "ALLSKY_SFC_SW_DWN", "T2M", "T2MDEW", "TS", "QV2M", "RH2M",
    "PS", "WS2M", "GWETTOP", "GWETROOT", "GWETPROF"};

inline constexpr std::array<const char*, 4> kIdentifierNames = {"LAT", "LON", "YEAR", "DOY"};

double weather_param(const WeatherRecord& r, int index);
void set_weather_param(WeatherRecord& r, int index, double value);

bool is_leap_year(int year);

// Hard invariants (DOY range and leap rule, RH percent, wetness fractions):
// violating rows are never kept. Soft checks (year window, geographic
// bounding box) warn by default and fail only under strict validation.
// Each returns a description of the first violation, or empty if clean.
std::string hard_violation(const WeatherRecord& r);
std::string soft_violation(const WeatherRecord& r);

// One parsed district file: rows in file order, with a per-row flag marking
// rows that contained the sentinel fill value.
struct DistrictPart {
    std::string label;  // district identifier (file stem)
    std::vector<WeatherRecord> rows;
    std::vector<bool> row_missing;
    std::vector<std::string> warnings;
};

struct Dataset {
    std::vector<WeatherRecord> records;         // sorted by (lat, lon, year, doy)
    std::vector<std::string> source_labels;     // per-record district identifier
    int district_count = 0;
    std::size_t dropped_rows = 0;               // rows removed during cleaning
    std::vector<std::string> warnings;

    std::size_t size() const { return records.size(); }
};

struct IngestOptions {
    double fill_value = -999.0;
    bool strict = false;  // range violations become errors instead of warnings
};

DistrictPart parse_power_csv(const std::string& path, double fill_value = -999.0);
DistrictPart parse_power_csv(std::istream& in, const std::string& label,
                             double fill_value = -999.0);

Dataset merge_and_clean(const std::vector<DistrictPart>& parts,
                        const IngestOptions& opts = {});

// Canonical cleaned-dataset CSV: DISTRICT,LAT,LON,YEAR,DOY,<11 params>.
void write_dataset_csv(const Dataset& ds, const std::string& path);
void write_dataset_csv(const Dataset& ds, std::ostream& out);
Dataset read_dataset_csv(const std::string& path);

}  // namespace drought
