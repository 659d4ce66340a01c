#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "imputekit/dataset.hpp"
#include "imputekit/rng.hpp"

namespace testing {

using namespace imputekit;

// The 3 x 3 table of the chained-equations walkthrough: Age, Income, Gender.
inline MaskedDataset walkthrough_table()
{
    std::vector<Column> columns{{"Age", ColumnKind::numeric()},
                                {"Income", ColumnKind::numeric()},
                                {"Gender", ColumnKind::categorical({"F", "M"})}};
    std::vector<std::vector<std::optional<double>>> cells{
        {33.0, 18.0, std::nullopt}, {std::nullopt, 12000.0, 13542.0}, {0.0, std::nullopt, 1.0}};
    return MaskedDataset(columns, cells);
}

inline const char* walkthrough_csv()
{
    return "Age,Income,Gender\n33,NA,F\n18,12000,NA\nNA,13542,M\n";
}

struct FuzzShape
{
    std::size_t rows = 40;
    std::size_t numeric = 3;
    std::size_t categorical = 1;
    double miss_prob = 0.2;
};

// Random mixed dataset. Numeric columns are correlated through a shared
// latent factor; every column keeps at least `min_observed` observed cells.
inline MaskedDataset fuzz_dataset(std::uint64_t seed, const FuzzShape& shape = {}, std::size_t min_observed = 2)
{
    auto rng = seed_tree(seed, {7});
    std::vector<Column> columns;
    std::vector<std::vector<double>> values;
    std::vector<double> latent(shape.rows);
    for (auto& z : latent) {
        z = rng.normal();
    }
    for (std::size_t j = 0; j < shape.numeric; ++j) {
        columns.push_back({"n" + std::to_string(j), ColumnKind::numeric()});
        std::vector<double> v(shape.rows);
        for (std::size_t i = 0; i < shape.rows; ++i) {
            v[i] = latent[i] * static_cast<double>(j + 1) + rng.normal() * 0.5 + 10.0 * static_cast<double>(j);
        }
        values.push_back(std::move(v));
    }
    for (std::size_t j = 0; j < shape.categorical; ++j) {
        const std::size_t levels = 2 + j % 3;
        std::vector<std::string> labels;
        for (std::size_t l = 0; l < levels; ++l) {
            labels.push_back("L" + std::to_string(l));
        }
        columns.push_back({"c" + std::to_string(j), ColumnKind::categorical(labels)});
        std::vector<double> v(shape.rows);
        for (std::size_t i = 0; i < shape.rows; ++i) {
            const bool high = latent[i] + rng.normal() * 0.5 > 0.0;
            v[i] = static_cast<double>(high ? rng.index(levels) : 0);
        }
        values.push_back(std::move(v));
    }
    MaskMatrix mask(shape.rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        std::size_t observed = shape.rows;
        for (std::size_t i = 0; i < shape.rows; ++i) {
            if (observed > min_observed && rng.bernoulli(shape.miss_prob)) {
                mask.set(i, j, true);
                --observed;
            }
        }
    }
    return MaskedDataset(columns, values, mask);
}

inline bool same_bits(double a, double b)
{
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// Observed cells carried over bit for bit; imputed categorical cells are levels.
inline bool preserves_observed(const MaskedDataset& source, const CompletedDataset& completed)
{
    if (completed.rows() != source.rows() || completed.cols() != source.cols()) {
        return false;
    }
    for (std::size_t j = 0; j < source.cols(); ++j) {
        const auto& kind = source.column(j).kind;
        for (std::size_t i = 0; i < source.rows(); ++i) {
            const double v = completed.value(i, j);
            if (!source.is_missing(i, j)) {
                if (!same_bits(v, source.values(j)[i])) {
                    return false;
                }
            } else if (!std::isfinite(v)) {
                return false;
            } else if (kind.is_categorical() &&
                       (v != std::floor(v) || v < 0 || v >= static_cast<double>(kind.level_count()))) {
                return false;
            }
        }
    }
    return completed.imputed_mask() == source.mask();
}

}  // namespace testing
