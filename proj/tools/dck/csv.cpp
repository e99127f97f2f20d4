#include "csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dck/error.hpp"

namespace dck::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

CsvTable::CsvTable(const std::vector<std::string>& columns, const std::string& config_hash)
    : columns_(columns.size()) {
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "# config_hash=" + config_hash + "\n";
}

void CsvTable::separate() {
    if (filled_ == columns_) throw Error("csv row has more cells than columns");
    if (filled_++ > 0) text_ += ',';
}

CsvTable& CsvTable::cell(double x) {
    separate();
    text_ += format_double(x);
    return *this;
}

CsvTable& CsvTable::cell(std::size_t x) {
    separate();
    text_ += std::to_string(x);
    return *this;
}

CsvTable& CsvTable::cell(const std::string& s) {
    if (s.find_first_of(",\"\n") != std::string::npos) throw Error("csv cell must not contain separators: " + s);
    separate();
    text_ += s;
    return *this;
}

void CsvTable::end_row() {
    if (filled_ != columns_) throw Error("csv row has fewer cells than columns");
    text_ += '\n';
    filled_ = 0;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw InputError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw InputError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::optional<std::size_t> DataTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) return i;
    }
    return std::nullopt;
}

DataTable read_numeric_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open data file " + path.string());
    const std::string where = path.filename().string() + " line ";
    DataTable table;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (table.columns.empty()) {
            table.columns = split(trim(body.substr(0, body.find('#'))));
            for (const auto& c : table.columns) {
                if (c.empty()) throw InputError(where + std::to_string(number) + ": empty column name in header");
            }
            continue;
        }
        const auto fields = split(body);
        if (fields.size() != table.columns.size()) {
            throw InputError(where + std::to_string(number) + ": expected " + std::to_string(table.columns.size()) +
                             " columns, found " + std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const char* begin = fields[c].c_str();
            char* end = nullptr;
            errno = 0;
            const double x = std::strtod(begin, &end);
            if (fields[c].empty() || end != begin + fields[c].size() || errno == ERANGE) {
                throw InputError(where + std::to_string(number) + ": column '" + table.columns[c] +
                                 "' is not a number: '" + fields[c] + "'");
            }
            row.push_back(x);
        }
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(number);
    }
    if (table.columns.empty()) throw InputError("data file " + path.string() + " is empty");
    if (table.rows.empty()) throw InputError("data file " + path.string() + " has a header but no rows");
    return table;
}

}  // namespace dck::cli
