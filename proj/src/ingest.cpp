#include "drought/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "drought/error.hpp"

namespace drought {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    const std::string t = trim(cell);
    double v = 0.0;
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size()) {
        throw InputError("unparseable numeric cell at data row " + std::to_string(row) +
                         ", column " + col + ": '" + t + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

double weather_param(const WeatherRecord& r, int index) {
    switch (index) {
        case 0: return r.allsky_sfc_sw_dwn;
        case 1: return r.t2m;
        case 2: return r.t2mdew;
        case 3: return r.ts;
        case 4: return r.qv2m;
        case 5: return r.rh2m;
        case 6: return r.ps;
        case 7: return r.ws2m;
        case 8: return r.gwettop;
        case 9: return r.gwetroot;
        case 10: return r.gwetprof;
        default: throw InputError("weather parameter index out of range");
    }
}

void set_weather_param(WeatherRecord& r, int index, double value) {
    switch (index) {
        case 0: r.allsky_sfc_sw_dwn = value; break;
        case 1: r.t2m = value; break;
        case 2: r.t2mdew = value; break;
        case 3: r.ts = value; break;
        case 4: r.qv2m = value; break;
        case 5: r.rh2m = value; break;
        case 6: r.ps = value; break;
        case 7: r.ws2m = value; break;
        case 8: r.gwettop = value; break;
        case 9: r.gwetroot = value; break;
        case 10: r.gwetprof = value; break;
        default: throw InputError("weather parameter index out of range");
    }
}

bool is_leap_year(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

std::string hard_violation(const WeatherRecord& r) {
    if (r.doy < 1 || r.doy > 366) return "DOY out of [1, 366]";
    if (r.doy == 366 && !is_leap_year(r.year)) return "DOY 366 in non-leap year";
    if (r.rh2m < 0.0 || r.rh2m > 100.0) return "RH2M out of [0, 100]";
    if (r.gwettop < 0.0 || r.gwettop > 1.0) return "GWETTOP out of [0, 1]";
    if (r.gwetroot < 0.0 || r.gwetroot > 1.0) return "GWETROOT out of [0, 1]";
    if (r.gwetprof < 0.0 || r.gwetprof > 1.0) return "GWETPROF out of [0, 1]";
    return "";
}

std::string soft_violation(const WeatherRecord& r) {
    if (r.year < 2012 || r.year > 2024) return "year outside [2012, 2024]";
    if (r.latitude < 20.5 || r.latitude > 26.7) return "latitude outside [20.5, 26.7]";
    if (r.longitude < 88.0 || r.longitude > 92.7) return "longitude outside [88.0, 92.7]";
    return "";
}

DistrictPart parse_power_csv(const std::string& path, double fill_value) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    return parse_power_csv(in, std::filesystem::path(path).stem().string(), fill_value);
}

DistrictPart parse_power_csv(std::istream& in, const std::string& label, double fill_value) {
    DistrictPart part;
    part.label = label;

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }

    // Raw satellite exports carry a metadata block terminated by -END HEADER-;
    // the column-header row follows it. Plain files start with the header row.
    std::size_t header_row = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].find("-END HEADER-") != std::string::npos) {
            header_row = i + 1;
            break;
        }
    }
    while (header_row < lines.size() && trim(lines[header_row]).empty()) ++header_row;
    if (header_row >= lines.size()) throw InputError("empty-input: no header row in " + label);

    const auto header = split_csv_line(lines[header_row]);
    std::map<std::string, int> col_index;
    for (std::size_t c = 0; c < header.size(); ++c) {
        col_index[upper(trim(header[c]))] = static_cast<int>(c);
    }

    auto find_col = [&](std::initializer_list<const char*> aliases) {
        for (const char* a : aliases) {
            auto it = col_index.find(a);
            if (it != col_index.end()) return it->second;
        }
        throw InputError("missing mandatory column " + std::string(*aliases.begin()) +
                         " in " + label);
    };

    const int c_lat = find_col({"LAT", "LATITUDE"});
    const int c_lon = find_col({"LON", "LONGITUDE"});
    const int c_year = find_col({"YEAR"});
    const int c_doy = find_col({"DOY"});
    std::array<int, kWeatherParamCount> c_param{};
    for (int p = 0; p < kWeatherParamCount; ++p) c_param[p] = find_col({kWeatherParamNames[p]});

    std::set<int> known{c_lat, c_lon, c_year, c_doy};
    known.insert(c_param.begin(), c_param.end());
    for (const auto& [name, idx] : col_index) {
        if (!known.count(idx)) {
            part.warnings.push_back("ignoring unknown column " + name + " in " + label);
        }
    }

    std::size_t data_row = 0;
    for (std::size_t i = header_row + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        ++data_row;
        const auto cells = split_csv_line(lines[i]);
        auto cell = [&](int c) -> const std::string& {
            if (c >= static_cast<int>(cells.size())) {
                throw InputError("short row " + std::to_string(data_row) + " in " + label);
            }
            return cells[static_cast<std::size_t>(c)];
        };

        WeatherRecord rec;
        rec.latitude = parse_cell(cell(c_lat), data_row, "LAT");
        rec.longitude = parse_cell(cell(c_lon), data_row, "LON");
        rec.year = static_cast<int>(parse_cell(cell(c_year), data_row, "YEAR"));
        rec.doy = static_cast<int>(parse_cell(cell(c_doy), data_row, "DOY"));

        bool missing = false;
        for (int p = 0; p < kWeatherParamCount; ++p) {
            const double v = parse_cell(cell(c_param[p]), data_row, kWeatherParamNames[p]);
            if (v == fill_value || std::isnan(v)) missing = true;
            set_weather_param(rec, p, v);
        }
        part.rows.push_back(rec);
        part.row_missing.push_back(missing);
    }

    if (part.rows.empty()) throw InputError("empty-input: no data rows in " + label);
    return part;
}

Dataset merge_and_clean(const std::vector<DistrictPart>& parts, const IngestOptions& opts) {
    Dataset ds;
    std::size_t dropped = 0;

    struct Tagged {
        WeatherRecord rec;
        std::string label;
    };
    std::vector<Tagged> rows;
    for (const auto& part : parts) {
        ds.warnings.insert(ds.warnings.end(), part.warnings.begin(), part.warnings.end());
        for (std::size_t i = 0; i < part.rows.size(); ++i) {
            if (part.row_missing[i]) {
                ++dropped;
                continue;
            }
            const auto& rec = part.rows[i];
            if (const auto v = hard_violation(rec); !v.empty()) {
                if (opts.strict) throw InputError("invalid record in " + part.label + ": " + v);
                ds.warnings.push_back("dropped invalid record in " + part.label + ": " + v);
                ++dropped;
                continue;
            }
            if (const auto v = soft_violation(rec); !v.empty()) {
                if (opts.strict) throw InputError("record out of range in " + part.label + ": " + v);
                ds.warnings.push_back("out-of-range record in " + part.label + ": " + v);
            }
            rows.push_back({rec, part.label});
        }
    }
    if (rows.empty()) throw InputError("empty-input: zero surviving rows after cleaning");

    std::stable_sort(rows.begin(), rows.end(), [](const Tagged& a, const Tagged& b) {
        return std::tie(a.rec.latitude, a.rec.longitude, a.rec.year, a.rec.doy) <
               std::tie(b.rec.latitude, b.rec.longitude, b.rec.year, b.rec.doy);
    });

    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& a = rows[i - 1].rec;
        const auto& b = rows[i].rec;
        if (a.latitude == b.latitude && a.longitude == b.longitude && a.year == b.year &&
            a.doy == b.doy) {
            throw InputError("duplicate (lat, lon, year, doy) key: " +
                             std::to_string(a.latitude) + ", " + std::to_string(a.longitude) +
                             ", " + std::to_string(a.year) + ", " + std::to_string(a.doy));
        }
    }

    std::set<std::pair<double, double>> coords;
    ds.records.reserve(rows.size());
    ds.source_labels.reserve(rows.size());
    for (auto& t : rows) {
        coords.insert({t.rec.latitude, t.rec.longitude});
        ds.records.push_back(t.rec);
        ds.source_labels.push_back(std::move(t.label));
    }
    ds.district_count = static_cast<int>(coords.size());
    ds.dropped_rows = dropped;
    return ds;
}

void write_dataset_csv(const Dataset& ds, std::ostream& out) {
    out << "DISTRICT,LAT,LON,YEAR,DOY";
    for (const char* name : kWeatherParamNames) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < ds.records.size(); ++i) {
        const auto& r = ds.records[i];
        out << ds.source_labels[i] << ',' << format_double(r.latitude) << ','
            << format_double(r.longitude) << ',' << r.year << ',' << r.doy;
        for (int p = 0; p < kWeatherParamCount; ++p) out << ',' << format_double(weather_param(r, p));
        out << '\n';
    }
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    write_dataset_csv(ds, out);
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw InputError("empty-input: " + path);

    Dataset ds;
    std::set<std::pair<double, double>> coords;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_csv_line(line);
        if (cells.size() != 5 + kWeatherParamCount) {
            throw InputError("malformed row " + std::to_string(row) + " in " + path);
        }
        WeatherRecord rec;
        rec.latitude = parse_cell(cells[1], row, "LAT");
        rec.longitude = parse_cell(cells[2], row, "LON");
        rec.year = static_cast<int>(parse_cell(cells[3], row, "YEAR"));
        rec.doy = static_cast<int>(parse_cell(cells[4], row, "DOY"));
        for (int p = 0; p < kWeatherParamCount; ++p) {
            set_weather_param(rec, p, parse_cell(cells[5 + static_cast<std::size_t>(p)], row,
                                                 kWeatherParamNames[p]));
        }
        coords.insert({rec.latitude, rec.longitude});
        ds.records.push_back(rec);
        ds.source_labels.push_back(trim(cells[0]));
    }
    if (ds.records.empty()) throw InputError("empty-input: " + path);
    ds.district_count = static_cast<int>(coords.size());
    return ds;
}

}  // namespace drought
