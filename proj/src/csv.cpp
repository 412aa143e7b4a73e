#include "stance/csv.hpp"

#include "stance/error.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

namespace stance::csv {

std::optional<std::size_t> Table::find(std::string_view column) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == column) return i;
    }
    return std::nullopt;
}

std::size_t Table::require(std::string_view column, std::string_view source) const {
    if (auto pos = find(column)) return *pos;
    throw SchemaError(std::string(source) + ": missing column '" + std::string(column) + "'");
}

Table parse(std::string_view text, char delimiter) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool row_has_data = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        row_has_data = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
            row_has_data = true;
        } else if (c == delimiter) {
            end_field();
            row_has_data = true;
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            end_row();
        } else {
            field.push_back(c);
            field_started = true;
            row_has_data = true;
        }
    }
    if (in_quotes) throw SchemaError("unterminated quoted field at end of input");
    if (row_has_data || !row.empty()) end_row();

    Table table;
    if (!rows.empty()) {
        table.header = std::move(rows.front());
        rows.erase(rows.begin());
    }
    // A trailing blank line yields a single empty field; drop such rows.
    std::erase_if(rows, [](const Row& r) { return r.size() == 1 && r.front().empty(); });
    table.rows = std::move(rows);
    return table;
}

Table parse_tsv(std::string_view text) {
    Table table;
    bool first = true;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        Row row;
        std::size_t pos = 0;
        while (true) {
            const std::size_t tab = line.find('\t', pos);
            row.emplace_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
            if (tab == std::string_view::npos) break;
            pos = tab + 1;
        }
        if (first) {
            table.header = std::move(row);
            first = false;
        } else {
            table.rows.push_back(std::move(row));
        }
        if (end == text.size()) break;
    }
    return table;
}

std::string escape(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\r', '\n'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, const Row& row, char delimiter) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.put(delimiter);
        out << escape(row[i], delimiter);
    }
    out.put('\n');
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw Error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace stance::csv
