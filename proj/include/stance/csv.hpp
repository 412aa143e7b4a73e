#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stance::csv {

using Row = std::vector<std::string>;

/// Parsed delimited file: a header row plus data rows.
struct Table {
    Row header;
    std::vector<Row> rows;

    /// Column position by name, or nullopt.
    std::optional<std::size_t> find(std::string_view column) const;
    /// Column position by name; throws SchemaError naming the column and `source`.
    std::size_t require(std::string_view column, std::string_view source) const;
};

/// RFC 4180 reader (quoted fields may contain delimiters, quotes and newlines).
Table parse(std::string_view text, char delimiter = ',');

/// Tab-separated reader with no quoting: every line is split on '\t'.
Table parse_tsv(std::string_view text);

/// Quotes a field only when it contains the delimiter, a quote, CR or LF.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, const Row& row, char delimiter = ',');

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace stance::csv
