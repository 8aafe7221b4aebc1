#include "mic/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mic {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "null";
}

void validate_iso_date(const std::string& s, const std::string& path) {
    // YYYY-MM-DD; lexicographic order equals chronological order.
    auto fail = [&] { throw IoError("unparsable timestamp '" + s + "' in " + path); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
    for (std::size_t k : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u}) {
        if (!std::isdigit(static_cast<unsigned char>(s[k]))) fail();
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    if (month < 1 || month > 12 || day < 1 || day > 31) fail();
}

double parse_number(const std::string& s, const std::string& path) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size() && s.find_first_not_of(" \t", pos) != std::string::npos) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception&) {
        throw IoError("unparsable number '" + s + "' in " + path);
    }
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty file " + path);
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split_csv_line(line));
    }
    return t;
}

std::size_t column_index(const Table& t, const std::string& name, const std::string& path) {
    for (std::size_t k = 0; k < t.header.size(); ++k) {
        if (t.header[k] == name) return k;
    }
    throw IoError("column '" + name + "' not found in " + path);
}

template <typename Row>
void sort_and_check_timestamps(std::vector<Row>& rows, const std::string& path) {
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k].first == rows[k - 1].first) {
            throw IoError("duplicate timestamp " + rows[k].first + " in " + path);
        }
    }
}

}  // namespace

AlignedSeries load_prices(const std::string& path, const std::string& column_x,
                          const std::string& column_y) {
    const Table t = read_table(path);
    const std::size_t cx = column_index(t, column_x, path);
    const std::size_t cy = column_index(t, column_y, path);

    std::vector<std::pair<std::string, std::pair<double, double>>> rows;
    for (const auto& r : t.rows) {
        if (r.empty()) continue;
        const std::size_t need = std::max(cx, cy);
        if (r.size() <= need) throw IoError("short row in " + path);
        if (is_missing(r[cx]) || is_missing(r[cy])) continue;
        validate_iso_date(r[0], path);
        rows.emplace_back(r[0], std::make_pair(parse_number(r[cx], path),
                                               parse_number(r[cy], path)));
    }
    if (rows.size() < 3) {
        throw IoError("fewer than 3 usable rows in " + path);
    }
    sort_and_check_timestamps(rows, path);

    AlignedSeries out;
    out.timestamps.reserve(rows.size());
    out.x.reserve(rows.size());
    out.y.reserve(rows.size());
    for (auto& r : rows) {
        out.timestamps.push_back(std::move(r.first));
        out.x.push_back(r.second.first);
        out.y.push_back(r.second.second);
    }
    return out;
}

Series load_series(const std::string& path, const std::string& column) {
    const Table t = read_table(path);
    const std::size_t c = column_index(t, column, path);
    std::vector<std::pair<std::string, double>> rows;
    for (const auto& r : t.rows) {
        if (r.empty()) continue;
        if (r.size() <= c) throw IoError("short row in " + path);
        if (is_missing(r[c])) continue;
        validate_iso_date(r[0], path);
        rows.emplace_back(r[0], parse_number(r[c], path));
    }
    sort_and_check_timestamps(rows, path);
    Series out;
    for (auto& r : rows) {
        out.timestamps.push_back(std::move(r.first));
        out.values.push_back(r.second);
    }
    return out;
}

AlignedSeries align(const Series& x, const Series& y) {
    AlignedSeries out;
    std::size_t a = 0, b = 0;
    while (a < x.timestamps.size() && b < y.timestamps.size()) {
        if (x.timestamps[a] < y.timestamps[b]) {
            ++a;
        } else if (y.timestamps[b] < x.timestamps[a]) {
            ++b;
        } else {
            out.timestamps.push_back(x.timestamps[a]);
            out.x.push_back(x.values[a]);
            out.y.push_back(y.values[b]);
            ++a;
            ++b;
        }
    }
    if (out.size() < 3) throw ValidationError("fewer than 3 overlapping timestamps");
    return out;
}

AlignedSeries log_returns(const AlignedSeries& s) {
    if (s.size() < 2) throw ValidationError("need at least two prices for returns");
    AlignedSeries out;
    out.timestamps.reserve(s.size() - 1);
    out.x.reserve(s.size() - 1);
    out.y.reserve(s.size() - 1);
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (!(s.x[k] > 0.0) || !(s.y[k] > 0.0)) {
            throw ValidationError("non-positive price at " + s.timestamps[k]);
        }
    }
    for (std::size_t k = 1; k < s.size(); ++k) {
        out.timestamps.push_back(s.timestamps[k]);
        out.x.push_back(std::log(s.x[k]) - std::log(s.x[k - 1]));
        out.y.push_back(std::log(s.y[k]) - std::log(s.y[k - 1]));
    }
    return out;
}

PseudoObservations to_pseudo_observations(const AlignedSeries& s) {
    if (s.size() < 2) throw ValidationError("need at least two observations");
    return PseudoObservations{mid_ranks(s.x), mid_ranks(s.y)};
}

}  // namespace mic
