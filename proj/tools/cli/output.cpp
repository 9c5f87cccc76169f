#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "entdyn/error.hpp"

namespace entdyn::cli {

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    return csv_escape(std::get<std::string>(c));
}

nlohmann::ordered_json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return format_double(*d);
        return *d;
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

void write_atomically(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ArgumentError("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.close();
        if (!f) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw NumericalError("failed writing '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const Table& table, std::ostream& os) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << csv_escape(table.columns[i].name);
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

void write_json(const Table& table, std::ostream& os) {
    nlohmann::ordered_json j;
    j["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : table.columns) j["columns"].push_back(c.name);
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(cell_json(c));
        j["rows"].push_back(std::move(r));
    }
    os << j.dump(1) << '\n';
}

void emit(const Table& table, const std::string& format, const std::string& path, const nlohmann::ordered_json& config,
          double wall_seconds, std::ostream& out) {
    std::ostringstream body;
    if (format == "json")
        write_json(table, body);
    else
        write_csv(table, body);

    if (path.empty()) {
        out << body.str();
        return;
    }

    nlohmann::ordered_json manifest;
    manifest["tool"] = "entdyn";
    manifest["version"] = ENTDYN_VERSION;
    manifest["config"] = config;
    manifest["wall_clock_seconds"] = wall_seconds;
    manifest["columns"] = nlohmann::ordered_json::array();
    for (const auto& c : table.columns)
        manifest["columns"].push_back({{"name", c.name}, {"units", c.units}, {"provenance", c.provenance}});
    manifest["summary"] = table.summary;

    const std::filesystem::path data_path(path);
    std::filesystem::path manifest_path = data_path;
    manifest_path += ".manifest.json";
    write_atomically(data_path, body.str());
    try {
        write_atomically(manifest_path, manifest.dump(2) + "\n");
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(data_path, ec);
        throw;
    }
}

}  // namespace entdyn::cli
