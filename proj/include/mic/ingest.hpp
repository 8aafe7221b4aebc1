#pragma once

#include <string>
#include <vector>

#include "mic/stats.hpp"

namespace mic {

/// Two series on a common, strictly increasing timestamp grid with no
/// missing values.
struct AlignedSeries {
    std::vector<std::string> timestamps;  // ISO-8601 dates
    std::vector<double> x;
    std::vector<double> y;
    std::size_t size() const { return timestamps.size(); }
};

struct Series {
    std::vector<std::string> timestamps;
    std::vector<double> values;
};

/// Reads a CSV with a header row whose first column is an ISO-8601
/// timestamp.  Rows where either named column is missing (empty, NA, NaN)
/// are dropped; unparsable numbers or dates are errors, as are duplicate
/// timestamps and fewer than 3 usable rows.
AlignedSeries load_prices(const std::string& path, const std::string& column_x,
                          const std::string& column_y);

/// Single-column variant, for joining across two files.
Series load_series(const std::string& path, const std::string& column);

/// Inner join on timestamps.
AlignedSeries align(const Series& x, const Series& y);

/// r_t = log(p_t) - log(p_{t-1}); output is one shorter and keeps the
/// later timestamp of each pair.  Throws on non-positive prices.
AlignedSeries log_returns(const AlignedSeries& s);

/// Mid-rank transform of both coordinates.
PseudoObservations to_pseudo_observations(const AlignedSeries& s);

}  // namespace mic
