#pragma once

// Tabular results and their manifests.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace entdyn::cli {

struct Column {
    std::string name;
    std::string units;
    std::string provenance;  // "analytic" or "monte-carlo"
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();

    void add_column(std::string name, std::string units, std::string provenance) {
        columns.push_back({std::move(name), std::move(units), std::move(provenance)});
    }
};

/// 17 significant digits, so the value round-trips exactly.
std::string format_double(double v);

void write_csv(const Table& table, std::ostream& os);
void write_json(const Table& table, std::ostream& os);

/// Writes the table (and, for a file target, `<path>.manifest.json`) through
/// temporary files renamed into place, so a failure leaves no partial output.
void emit(const Table& table, const std::string& format, const std::string& path, const nlohmann::ordered_json& config,
          double wall_seconds, std::ostream& out);

}  // namespace entdyn::cli
