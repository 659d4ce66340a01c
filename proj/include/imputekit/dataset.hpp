#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imputekit {

/// Numeric, or categorical over a fixed ordered list of level labels.
class ColumnKind
{
  public:
    static ColumnKind numeric() { return ColumnKind{}; }
    static ColumnKind categorical(std::vector<std::string> levels);

    bool is_categorical() const { return !levels_.empty(); }
    bool is_numeric() const { return levels_.empty(); }
    const std::vector<std::string>& levels() const { return levels_; }
    std::size_t level_count() const { return levels_.size(); }
    // Index of `label`, if it is one of the levels.
    std::optional<std::size_t> find_level(const std::string& label) const;

    friend bool operator==(const ColumnKind&, const ColumnKind&) = default;

  private:
    std::vector<std::string> levels_;
};

struct Column
{
    std::string name;
    ColumnKind kind;

    friend bool operator==(const Column&, const Column&) = default;
};

/// Dense row-major binary matrix; used for missingness masks.
class MaskMatrix
{
  public:
    MaskMatrix() = default;
    MaskMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool operator()(std::size_t i, std::size_t j) const { return bits_[i * cols_ + j] != 0; }
    void set(std::size_t i, std::size_t j, bool value) { bits_[i * cols_ + j] = value ? 1 : 0; }
    std::span<const std::uint8_t> row(std::size_t i) const
    {
        return {bits_.data() + i * cols_, cols_};
    }
    std::size_t count() const;
    std::size_t column_count(std::size_t j) const;

    friend bool operator==(const MaskMatrix&, const MaskMatrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint8_t> bits_;
};

/*!
 * Rectangular data with per-cell missingness.
 *
 * Values are stored column-major as doubles; categorical payloads are level
 * indices. Missing cells hold NaN in the value store and 1 in the mask.
 * Immutable after construction; every constructor validates the invariants
 * (finite numerics, valid level indices, no fully-missing column).
 */
class MaskedDataset
{
  public:
    MaskedDataset() = default;

    // `cells[j][i]` is the payload of row i in column j, or nullopt.
    MaskedDataset(std::vector<Column> columns, const std::vector<std::vector<std::optional<double>>>& cells);

    // Complete data: every cell present.
    MaskedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values);

    // Values plus an explicit mask; values under mask 1 are discarded.
    MaskedDataset(std::vector<Column> columns, std::vector<std::vector<double>> values, const MaskMatrix& mask);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t j) const { return columns_[j]; }

    bool is_missing(std::size_t i, std::size_t j) const { return mask_(i, j); }
    std::optional<double> cell(std::size_t i, std::size_t j) const;
    // Column values; NaN at missing cells.
    std::span<const double> values(std::size_t j) const { return values_[j]; }
    const std::vector<std::vector<double>>& column_values() const { return values_; }
    const MaskMatrix& mask() const { return mask_; }

    std::size_t missing_count(std::size_t j) const { return mask_.column_count(j); }
    std::size_t missing_count() const { return mask_.count(); }
    std::size_t observed_count(std::size_t j) const { return rows_ - missing_count(j); }
    bool complete() const { return missing_count() == 0; }

    // Copy with the union of the current mask and `extra` as missingness.
    MaskedDataset with_additional_missing(const MaskMatrix& extra) const;

    // Copy made of the given rows (repeats allowed), masks carried along.
    MaskedDataset select_rows(std::span<const std::size_t> rows) const;

    // Copy with numeric column j mapped through x -> (x - shift) / scale.
    MaskedDataset standardized(std::span<const double> shift, std::span<const double> scale) const;

  private:
    void validate() const;

    std::size_t rows_ = 0;
    std::vector<Column> columns_;
    std::vector<std::vector<double>> values_;
    MaskMatrix mask_;
};

/*!
 * A dataset with every cell filled, remembering which cells were imputed.
 *
 * Construction from a source MaskedDataset checks that observed cells are
 * carried over bitwise and that imputed categorical cells are valid levels.
 */
class CompletedDataset
{
  public:
    CompletedDataset() = default;
    CompletedDataset(const MaskedDataset& source, std::vector<std::vector<double>> values);

    // A complete MaskedDataset viewed as completed (no imputed cells).
    static CompletedDataset from_complete(const MaskedDataset& source);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t j) const { return columns_[j]; }
    double value(std::size_t i, std::size_t j) const { return values_[j][i]; }
    std::span<const double> values(std::size_t j) const { return values_[j]; }
    const std::vector<std::vector<double>>& column_values() const { return values_; }
    const MaskMatrix& imputed_mask() const { return imputed_mask_; }

    friend bool operator==(const CompletedDataset&, const CompletedDataset&) = default;

  private:
    std::size_t rows_ = 0;
    std::vector<Column> columns_;
    std::vector<std::vector<double>> values_;
    MaskMatrix imputed_mask_;
};

/// Rows grouped by identical mask row, groups ordered lexicographically.
struct PatternTable
{
    struct Group
    {
        std::vector<std::uint8_t> pattern;
        std::vector<std::size_t> rows;
    };
    std::vector<Group> groups;
};

/// Observed-cell summary of a column: mean or modal level, and sample sd.
struct ColumnStats
{
    double center = 0.0;
    std::optional<double> sd;  // numeric with >= 2 observations only
    std::size_t observed = 0;
};

const MaskMatrix& mask_of(const MaskedDataset& ds);
PatternTable patterns(const MaskedDataset& ds);
ColumnStats column_stats(const MaskedDataset& ds, std::size_t j);

}  // namespace imputekit
