#pragma once

#include <optional>
#include <string>

#include "crashlens/fitting.hpp"
#include "crashlens/price_series.hpp"

namespace crashlens {

// CSV ingestion settings. Dates must be ISO 8601 (the leading YYYY-MM-DD is
// used); the optional window [from, to] is inclusive on both ends.
struct CsvOptions {
    std::string date_column = "date";
    std::string price_column = "close";
    std::optional<std::string> from;
    std::optional<std::string> to;
};

// Reads a header-row CSV, sorts rows by date, filters to the window, and
// returns log-prices indexed 0..n-1 by row position (trading-day index).
// Malformed rows, missing columns, non-positive prices and an empty window
// raise std::runtime_error naming the offending file line.
PriceSeries ingest_csv(const std::string& path, const CsvOptions& options = {});

// Writes time_index,date_label,observed_log_price,fitted_log_price,residual
// rows at 12 significant digits plus a .json sidecar (same stem) carrying
// the fitted parameters and goodness-of-fit summary.
void export_fit(const PriceSeries& series, const FitResult& result, const std::string& csv_path);

// Writes a date,price CSV that ingest_csv accepts back. Missing labels are
// replaced by sequential calendar dates from 2000-01-01.
void export_series_csv(const PriceSeries& series, const std::string& path,
                       const std::string& date_column = "date",
                       const std::string& price_column = "close");

}  // namespace crashlens
