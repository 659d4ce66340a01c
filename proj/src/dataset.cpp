#include "imputekit/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "imputekit/error.hpp"

namespace imputekit {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool valid_level(double value, std::size_t level_count)
{
    return value >= 0.0 && value < static_cast<double>(level_count) && std::floor(value) == value;
}

}  // namespace

ColumnKind ColumnKind::categorical(std::vector<std::string> levels)
{
    if (levels.empty()) {
        throw IngestionError("categorical column needs at least one level");
    }
    std::set<std::string> seen;
    for (const auto& level : levels) {
        if (!seen.insert(level).second) {
            throw IngestionError("duplicate categorical level '" + level + "'");
        }
    }
    ColumnKind kind;
    kind.levels_ = std::move(levels);
    return kind;
}

std::optional<std::size_t> ColumnKind::find_level(const std::string& label) const
{
    auto it = std::find(levels_.begin(), levels_.end(), label);
    if (it == levels_.end()) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - levels_.begin());
}

std::size_t MaskMatrix::count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t MaskMatrix::column_count(std::size_t j) const
{
    std::size_t total = 0;
    for (std::size_t i = 0; i < rows_; ++i) {
        total += bits_[i * cols_ + j];
    }
    return total;
}

MaskedDataset::MaskedDataset(std::vector<Column> columns,
                             const std::vector<std::vector<std::optional<double>>>& cells)
    : columns_(std::move(columns))
{
    if (cells.size() != columns_.size()) {
        throw IngestionError("cell columns do not match the column list");
    }
    rows_ = cells.empty() ? 0 : cells.front().size();
    mask_ = MaskMatrix(rows_, columns_.size());
    values_.assign(columns_.size(), std::vector<double>(rows_, kMissing));
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (cells[j].size() != rows_) {
            throw IngestionError("column '" + columns_[j].name + "' has the wrong length");
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (cells[j][i]) {
                values_[j][i] = *cells[j][i];
            } else {
                mask_.set(i, j, true);
            }
        }
    }
    validate();
}

MaskedDataset::MaskedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values)
    : columns_(std::move(columns)), values_(std::move(values))
{
    if (values_.size() != columns_.size()) {
        throw IngestionError("value columns do not match the column list");
    }
    rows_ = values_.empty() ? 0 : values_.front().size();
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (values_[j].size() != rows_) {
            throw IngestionError("column '" + columns_[j].name + "' has the wrong length");
        }
    }
    mask_ = MaskMatrix(rows_, columns_.size());
    validate();
}

MaskedDataset::MaskedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values,
                             const MaskMatrix& mask)
    : columns_(std::move(columns)), values_(std::move(values)), mask_(mask)
{
    if (values_.size() != columns_.size()) {
        throw IngestionError("value columns do not match the column list");
    }
    rows_ = values_.empty() ? 0 : values_.front().size();
    if (mask_.rows() != rows_ || mask_.cols() != columns_.size()) {
        throw IngestionError("mask shape does not match the data");
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (values_[j].size() != rows_) {
            throw IngestionError("column '" + columns_[j].name + "' has the wrong length");
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (mask_(i, j)) {
                values_[j][i] = kMissing;
            }
        }
    }
    validate();
}

void MaskedDataset::validate() const
{
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        const auto& col = columns_[j];
        if (rows_ > 0 && missing_count(j) == rows_) {
            throw IngestionError("column '" + col.name + "' is entirely missing");
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (mask_(i, j)) {
                continue;
            }
            const double v = values_[j][i];
            if (col.kind.is_categorical()) {
                if (!valid_level(v, col.kind.level_count())) {
                    throw IngestionError("column '" + col.name + "' row " + std::to_string(i + 1) +
                                         ": invalid level index");
                }
            } else if (!std::isfinite(v)) {
                throw IngestionError("column '" + col.name + "' row " + std::to_string(i + 1) +
                                     ": non-finite value");
            }
        }
    }
}

std::optional<double> MaskedDataset::cell(std::size_t i, std::size_t j) const
{
    if (mask_(i, j)) {
        return std::nullopt;
    }
    return values_[j][i];
}

MaskedDataset MaskedDataset::with_additional_missing(const MaskMatrix& extra) const
{
    if (extra.rows() != rows_ || extra.cols() != cols()) {
        throw ConfigError("additional mask shape does not match the data");
    }
    MaskMatrix merged = mask_;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols(); ++j) {
            if (extra(i, j)) {
                merged.set(i, j, true);
            }
        }
    }
    return MaskedDataset(columns_, values_, merged);
}

MaskedDataset MaskedDataset::select_rows(std::span<const std::size_t> rows) const
{
    std::vector<std::vector<double>> values(cols(), std::vector<double>(rows.size()));
    MaskMatrix mask(rows.size(), cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::size_t src = rows[r];
        for (std::size_t j = 0; j < cols(); ++j) {
            values[j][r] = values_[j][src];
            mask.set(r, j, mask_(src, j));
        }
    }
    return MaskedDataset(columns_, std::move(values), mask);
}

MaskedDataset MaskedDataset::standardized(std::span<const double> shift, std::span<const double> scale) const
{
    auto values = values_;
    for (std::size_t j = 0; j < cols(); ++j) {
        if (columns_[j].kind.is_categorical()) {
            continue;
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!mask_(i, j)) {
                values[j][i] = (values[j][i] - shift[j]) / scale[j];
            }
        }
    }
    return MaskedDataset(columns_, std::move(values), mask_);
}

CompletedDataset::CompletedDataset(const MaskedDataset& source, std::vector<std::vector<double>> values)
    : rows_(source.rows()), columns_(source.columns()), values_(std::move(values)), imputed_mask_(source.mask())
{
    if (values_.size() != source.cols()) {
        throw Error("completed data has the wrong number of columns");
    }
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (values_[j].size() != rows_) {
            throw Error("completed column '" + columns_[j].name + "' has the wrong length");
        }
        const auto& kind = columns_[j].kind;
        const auto observed = source.values(j);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double v = values_[j][i];
            if (!imputed_mask_(i, j)) {
                if (std::bit_cast<std::uint64_t>(v) != std::bit_cast<std::uint64_t>(observed[i])) {
                    throw Error("observed cell altered in column '" + columns_[j].name + "'");
                }
            } else if (kind.is_categorical() ? !valid_level(v, kind.level_count()) : !std::isfinite(v)) {
                throw Error("invalid imputed value in column '" + columns_[j].name + "' row " +
                            std::to_string(i + 1));
            }
        }
    }
}

CompletedDataset CompletedDataset::from_complete(const MaskedDataset& source)
{
    if (!source.complete()) {
        throw ConfigError("dataset has missing cells");
    }
    return CompletedDataset(source, source.column_values());
}

const MaskMatrix& mask_of(const MaskedDataset& ds)
{
    return ds.mask();
}

PatternTable patterns(const MaskedDataset& ds)
{
    std::map<std::vector<std::uint8_t>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        const auto row = ds.mask().row(i);
        groups[std::vector<std::uint8_t>(row.begin(), row.end())].push_back(i);
    }
    PatternTable table;
    table.groups.reserve(groups.size());
    for (auto& [pattern, rows] : groups) {
        table.groups.push_back({pattern, std::move(rows)});
    }
    return table;
}

ColumnStats column_stats(const MaskedDataset& ds, std::size_t j)
{
    ColumnStats stats;
    stats.observed = ds.observed_count(j);
    if (stats.observed == 0) {
        throw ConfigError("column '" + ds.column(j).name + "' has no observed cells");
    }
    const auto values = ds.values(j);
    const auto& kind = ds.column(j).kind;
    if (kind.is_categorical()) {
        std::vector<std::size_t> counts(kind.level_count(), 0);
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (!ds.is_missing(i, j)) {
                ++counts[static_cast<std::size_t>(values[i])];
            }
        }
        // max_element returns the first maximum: ties go to the lowest index.
        stats.center = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        return stats;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        if (!ds.is_missing(i, j)) {
            sum += values[i];
        }
    }
    const double mean = sum / static_cast<double>(stats.observed);
    stats.center = mean;
    if (stats.observed >= 2) {
        double ss = 0.0;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (!ds.is_missing(i, j)) {
                ss += (values[i] - mean) * (values[i] - mean);
            }
        }
        stats.sd = std::sqrt(ss / static_cast<double>(stats.observed - 1));
    }
    return stats;
}

}  // namespace imputekit
