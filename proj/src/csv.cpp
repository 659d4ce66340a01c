#include "imputekit/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "imputekit/error.hpp"

namespace imputekit {

namespace {

std::optional<double> parse_real(std::string_view token)
{
    if (token.empty()) {
        return std::nullopt;
    }
    // from_chars rejects a leading '+', which spreadsheets sometimes emit.
    if (token.front() == '+') {
        token.remove_prefix(1);
    }
    double value = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv_records(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t pos = 0; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (in_quotes) {
            if (c == '"') {
                if (pos + 1 < text.size() && text[pos + 1] == '"') {
                    field.push_back('"');
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') {
                    ++line;
                }
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) {
                throw ParseError("stray quote inside unquoted field", records.size() + 1);
            }
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (pos + 1 < text.size() && text[pos + 1] == '\n') {
                break;
            }
            end_record();
            ++line;
            break;
        case '\n':
            end_record();
            ++line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) {
        throw ParseError("unterminated quoted field", records.size() + 1);
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }
    return records;
}

MaskedDataset parse_csv(std::string_view text, const CsvOptions& options)
{
    auto records = parse_csv_records(text);
    // Blank lines carry no data.
    std::erase_if(records, [](const auto& r) { return r.size() == 1 && r.front().empty(); });
    if (records.empty()) {
        throw ParseError("missing header row", 1);
    }
    const auto& header = records.front();
    const std::size_t d = header.size();
    const std::size_t n = records.size() - 1;
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != d) {
            throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(records[r].size()) +
                                 " fields, expected " + std::to_string(d),
                             r + 1);
        }
    }
    if (!options.schema_hint.empty() && options.schema_hint.size() != d) {
        throw IngestionError("schema hint has " + std::to_string(options.schema_hint.size()) +
                             " entries for " + std::to_string(d) + " columns");
    }

    auto is_na = [&](const std::string& token) { return token.empty() || token == options.na_token; };

    std::vector<Column> columns;
    std::vector<std::vector<std::optional<double>>> cells(d, std::vector<std::optional<double>>(n));
    for (std::size_t j = 0; j < d; ++j) {
        std::optional<ColumnKind> hint;
        if (!options.schema_hint.empty()) {
            hint = options.schema_hint[j];
        }
        bool numeric = true;
        if (hint) {
            numeric = hint->is_numeric();
        } else {
            for (std::size_t i = 0; i < n && numeric; ++i) {
                const auto& token = records[i + 1][j];
                numeric = is_na(token) || parse_real(token).has_value();
            }
        }

        if (numeric) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto& token = records[i + 1][j];
                if (is_na(token)) {
                    continue;
                }
                auto value = parse_real(token);
                if (!value) {
                    throw IngestionError("column '" + header[j] + "' row " + std::to_string(i + 2) +
                                         ": '" + token + "' is not a number");
                }
                cells[j][i] = *value;
            }
            columns.push_back({header[j], ColumnKind::numeric()});
            continue;
        }

        std::vector<std::string> levels;
        if (hint) {
            levels = hint->levels();
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& token = records[i + 1][j];
            if (is_na(token)) {
                continue;
            }
            auto it = std::find(levels.begin(), levels.end(), token);
            if (it == levels.end()) {
                if (hint) {
                    throw IngestionError("column '" + header[j] + "' row " + std::to_string(i + 2) +
                                         ": unknown level '" + token + "'");
                }
                levels.push_back(token);
                it = levels.end() - 1;
            }
            cells[j][i] = static_cast<double>(it - levels.begin());
        }
        if (levels.empty()) {
            throw IngestionError("column '" + header[j] + "' is entirely missing");
        }
        columns.push_back({header[j], ColumnKind::categorical(std::move(levels))});
    }
    return MaskedDataset(std::move(columns), cells);
}

MaskedDataset read_csv(const std::filesystem::path& path, const CsvOptions& options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path.string() + "' for reading");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_csv(buffer.str(), options);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.row());
    } catch (const IngestionError& e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

std::string format_number(double value)
{
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        throw Error("number formatting failed");
    }
    return std::string(buffer, ptr);
}

std::string escape_field(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

namespace {

std::string format_cell(const Column& column, double value)
{
    if (column.kind.is_categorical()) {
        return escape_field(column.kind.levels()[static_cast<std::size_t>(value)]);
    }
    return format_number(value);
}

void append_header(std::string& out, const std::vector<Column>& columns)
{
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (j > 0) {
            out.push_back(',');
        }
        out += escape_field(columns[j].name);
    }
    out.push_back('\n');
}

}  // namespace

std::string to_csv(const MaskedDataset& ds, const std::string& na_token)
{
    std::string out;
    append_header(out, ds.columns());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            if (j > 0) {
                out.push_back(',');
            }
            out += ds.is_missing(i, j) ? escape_field(na_token) : format_cell(ds.column(j), ds.values(j)[i]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string to_csv(const CompletedDataset& ds)
{
    std::string out;
    append_header(out, ds.columns());
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            if (j > 0) {
                out.push_back(',');
            }
            out += format_cell(ds.column(j), ds.value(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw Error("write to '" + path.string() + "' failed");
    }
}

void write_csv(const MaskedDataset& ds, const std::filesystem::path& path, const std::string& na_token)
{
    write_text_file(path, to_csv(ds, na_token));
}

void write_csv(const CompletedDataset& ds, const std::filesystem::path& path)
{
    write_text_file(path, to_csv(ds));
}

void CsvTable::add_row(std::vector<std::string> fields)
{
    if (fields.size() != header_.size()) {
        throw Error("table row has " + std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(header_.size()));
    }
    rows_.push_back(std::move(fields));
}

std::string CsvTable::str() const
{
    std::string out;
    auto append = [&out](const std::vector<std::string>& fields) {
        for (std::size_t k = 0; k < fields.size(); ++k) {
            if (k > 0) {
                out.push_back(',');
            }
            out += escape_field(fields[k]);
        }
        out.push_back('\n');
    };
    append(header_);
    for (const auto& row : rows_) {
        append(row);
    }
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const
{
    write_text_file(path, str());
}

}  // namespace imputekit
