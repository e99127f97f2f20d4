#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dck::cli {

/// Formats a double so that it parses back to the same bits.
[[nodiscard]] std::string format_double(double x);

/// Accumulates CSV text. The first line names the columns (units as name
/// suffixes) immediately followed by "# config_hash=<hex>", so
/// readers that treat '#' as a comment see clean column names.
class CsvTable {
public:
    CsvTable(const std::vector<std::string>& columns, const std::string& config_hash);

    CsvTable& cell(double x);
    CsvTable& cell(std::size_t x);
    CsvTable& cell(const std::string& s);
    void end_row();

    [[nodiscard]] const std::string& text() const noexcept { return text_; }

private:
    void separate();

    std::string text_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

/// Writes to a temporary file next to `path`, then renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Rows of a numeric data file with a header naming its columns.
struct DataTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;  ///< 1-based source line of each row

    [[nodiscard]] std::optional<std::size_t> column(const std::string& name) const;
};

/// Parses a numeric CSV. Blank lines and lines starting with '#' are skipped;
/// anything after '#' on the header line is ignored. Throws InputError with
/// the offending line number on ragged rows or unparsable numbers, and on a
/// file without a header or without data rows.
[[nodiscard]] DataTable read_numeric_csv(const std::filesystem::path& path);

}  // namespace dck::cli
