#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "imputekit/dataset.hpp"

namespace imputekit {

struct CsvOptions
{
    // Fields equal to this token, or empty, are missing.
    std::string na_token = "NA";
    // Optional per-column kind override; nullopt entries are inferred.
    // A categorical hint fixes the level list and rejects unknown labels.
    std::vector<std::optional<ColumnKind>> schema_hint;
};

/// RFC 4180 record splitter; quoted fields may hold commas, quotes and newlines.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

MaskedDataset parse_csv(std::string_view text, const CsvOptions& options = {});
MaskedDataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});

std::string to_csv(const MaskedDataset& ds, const std::string& na_token = "NA");
std::string to_csv(const CompletedDataset& ds);
void write_csv(const MaskedDataset& ds, const std::filesystem::path& path, const std::string& na_token = "NA");
void write_csv(const CompletedDataset& ds, const std::filesystem::path& path);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_number(double value);

/// Quote a field when it contains a delimiter, quote, or line break.
std::string escape_field(std::string_view field);

/// Tabular text output for reports: header plus rows of preformatted fields.
class CsvTable
{
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> fields);
    std::size_t row_count() const { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// Write `text` to `path`, surfacing failures with the path in the message.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace imputekit
