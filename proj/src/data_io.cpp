#include "crashlens/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace crashlens {

namespace {

struct Date {
    int y = 0, m = 0, d = 0;
    auto operator<=>(const Date&) const = default;
};

// Accepts YYYY-MM-DD, optionally followed by an ISO 8601 time part.
std::optional<Date> parse_date(const std::string& text) {
    if (text.size() < 10) return std::nullopt;
    for (std::size_t i = 0; i < 10; ++i) {
        if (i == 4 || i == 7) {
            if (text[i] != '-') return std::nullopt;
        } else if (text[i] < '0' || text[i] > '9') {
            return std::nullopt;
        }
    }
    if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') return std::nullopt;
    Date date;
    date.y = std::stoi(text.substr(0, 4));
    date.m = std::stoi(text.substr(5, 2));
    date.d = std::stoi(text.substr(8, 2));
    if (date.m < 1 || date.m > 12 || date.d < 1 || date.d > 31) return std::nullopt;
    return date;
}

// Minimal RFC 4180 field splitting: quoted fields may contain commas and
// doubled quotes. Returns nullopt on an unterminated quote.
std::optional<std::vector<std::string>> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += ch;
        }
    }
    if (quoted) return std::nullopt;
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_sig12(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

Date next_day(Date date) {
    static constexpr int days_in[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = days_in[date.m - 1];
    if (date.m == 2 && is_leap(date.y)) dim = 29;
    if (++date.d > dim) {
        date.d = 1;
        if (++date.m > 12) {
            date.m = 1;
            ++date.y;
        }
    }
    return date;
}

std::string date_to_string(const Date& date) {
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02d", date.y, date.m, date.d);
    return buffer;
}

std::string sidecar_path(const std::string& csv_path) {
    const auto slash = csv_path.find_last_of("/\\");
    const auto dot = csv_path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return csv_path + ".json";
    return csv_path.substr(0, dot) + ".json";
}

}  // namespace

PriceSeries ingest_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("ingest_csv: " + path + " is empty");
    auto header = split_csv(line);
    if (!header) throw std::runtime_error("ingest_csv: malformed header row in " + path);

    std::ptrdiff_t date_idx = -1, price_idx = -1;
    for (std::size_t i = 0; i < header->size(); ++i) {
        const std::string name = trim((*header)[i]);
        if (name == options.date_column) date_idx = static_cast<std::ptrdiff_t>(i);
        if (name == options.price_column) price_idx = static_cast<std::ptrdiff_t>(i);
    }
    if (date_idx < 0)
        throw std::runtime_error("ingest_csv: missing date column '" + options.date_column + "'");
    if (price_idx < 0)
        throw std::runtime_error("ingest_csv: missing price column '" + options.price_column + "'");

    std::optional<Date> from, to;
    if (options.from) {
        from = parse_date(*options.from);
        if (!from) throw std::runtime_error("ingest_csv: unparseable --from date");
    }
    if (options.to) {
        to = parse_date(*options.to);
        if (!to) throw std::runtime_error("ingest_csv: unparseable --to date");
    }

    struct Row {
        Date date;
        std::string label;
        double log_price;
    };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto where = " at line " + std::to_string(line_no) + " of " + path;
        auto fields = split_csv(line);
        if (!fields) throw std::runtime_error("ingest_csv: unterminated quote" + where);
        if (fields->size() <= static_cast<std::size_t>(std::max(date_idx, price_idx)))
            throw std::runtime_error("ingest_csv: too few fields" + where);

        const std::string date_text = trim((*fields)[date_idx]);
        const auto date = parse_date(date_text);
        if (!date) throw std::runtime_error("ingest_csv: unparseable date '" + date_text + "'" + where);
        if (from && *date < *from) continue;
        if (to && *to < *date) continue;

        const std::string price_text = trim((*fields)[price_idx]);
        std::size_t consumed = 0;
        double price = 0.0;
        try {
            price = std::stod(price_text, &consumed);
        } catch (const std::exception&) {
            throw std::runtime_error("ingest_csv: unparseable price '" + price_text + "'" + where);
        }
        if (consumed != price_text.size())
            throw std::runtime_error("ingest_csv: unparseable price '" + price_text + "'" + where);
        if (!(price > 0.0))
            throw std::runtime_error("ingest_csv: non-positive price '" + price_text + "'" + where);

        rows.push_back({*date, date_text.substr(0, 10), std::log(price)});
    }
    if (rows.empty()) throw std::runtime_error("ingest_csv: no rows in the selected window of " + path);

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });

    PriceSeries series;
    series.times.reserve(rows.size());
    series.log_prices.reserve(rows.size());
    series.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        series.times.push_back(static_cast<double>(i));
        series.log_prices.push_back(rows[i].log_price);
        series.labels.push_back(rows[i].label);
    }
    return series;
}

void export_fit(const PriceSeries& series, const FitResult& result, const std::string& csv_path) {
    series.validate();
    if (result.residuals.size() != series.size())
        throw std::invalid_argument("export_fit: result does not belong to this series");

    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("export_fit: cannot write " + csv_path);
    out << "time_index,date_label,observed_log_price,fitted_log_price,residual\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double observed = series.log_prices[i];
        const double residual = result.residuals[i];
        out << format_sig12(series.times[i]) << ','
            << (series.has_labels() ? series.labels[i] : "") << ','
            << format_sig12(observed) << ',' << format_sig12(observed - residual) << ','
            << format_sig12(residual) << '\n';
    }
    if (!out) throw std::runtime_error("export_fit: write failed for " + csv_path);
    out.close();

    nlohmann::json params{{"A", result.params.A},         {"B", result.params.B},
                          {"C", result.params.C},         {"alpha", result.params.alpha},
                          {"t_c", result.params.t_c},     {"phi", result.params.phi},
                          {"omega", result.params.omega}};
    if (result.params.second_order()) {
        params["D"] = *result.params.D;
        params["psi"] = *result.params.psi;
    }
    nlohmann::json sidecar{{"params", params},
                           {"sse", result.sse},
                           {"mse", result.mse},
                           {"df", result.df},
                           {"r_squared", result.r_squared},
                           {"converged", result.converged},
                           {"starts_tried", result.starts_tried}};
    const std::string json_path = sidecar_path(csv_path);
    std::ofstream json_out(json_path);
    if (!json_out) throw std::runtime_error("export_fit: cannot write " + json_path);
    json_out << sidecar.dump(2) << '\n';
    if (!json_out) throw std::runtime_error("export_fit: write failed for " + json_path);
}

void export_series_csv(const PriceSeries& series, const std::string& path,
                       const std::string& date_column, const std::string& price_column) {
    series.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_series_csv: cannot write " + path);
    out << date_column << ',' << price_column << '\n';
    Date synthetic{2000, 1, 1};
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::string label =
            series.has_labels() ? series.labels[i] : date_to_string(synthetic);
        if (!series.has_labels()) synthetic = next_day(synthetic);
        out << label << ',' << format_sig12(std::exp(series.log_prices[i])) << '\n';
    }
    if (!out) throw std::runtime_error("export_series_csv: write failed for " + path);
}

}  // namespace crashlens
