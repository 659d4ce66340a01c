#include "imputekit/design.hpp"

#include <cmath>

#include "imputekit/error.hpp"

namespace imputekit {

DesignMatrix::DesignMatrix(Eigen::MatrixXd x) : x_(std::move(x))
{
    if (!x_.allFinite()) {
        throw FitError("design matrix has non-finite entries");
    }
}

std::size_t DesignMatrix::coefficient_count(const std::vector<Column>& columns,
                                            std::span<const std::size_t> predictors)
{
    std::size_t q = 1;
    for (auto j : predictors) {
        q += columns[j].kind.is_categorical() ? columns[j].kind.level_count() - 1 : 1;
    }
    return q;
}

DesignMatrix DesignMatrix::encode(const std::vector<Column>& columns, const std::vector<std::vector<double>>& values,
                                  std::span<const std::size_t> predictors, std::span<const std::size_t> rows)
{
    const auto q = static_cast<Eigen::Index>(coefficient_count(columns, predictors));
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), q);
    x.col(0).setOnes();
    Eigen::Index offset = 1;
    for (auto j : predictors) {
        const auto& column = values[j];
        if (columns[j].kind.is_categorical()) {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto level = static_cast<Eigen::Index>(column[rows[r]]);
                if (level > 0) {
                    x(static_cast<Eigen::Index>(r), offset + level - 1) = 1.0;
                }
            }
            offset += static_cast<Eigen::Index>(columns[j].kind.level_count()) - 1;
        } else {
            for (std::size_t r = 0; r < rows.size(); ++r) {
                x(static_cast<Eigen::Index>(r), offset) = column[rows[r]];
            }
            ++offset;
        }
    }
    return DesignMatrix(std::move(x));
}

std::vector<double> FeatureSet::row(std::size_t i) const
{
    std::vector<double> out(columns.size());
    for (std::size_t f = 0; f < columns.size(); ++f) {
        out[f] = columns[f][i];
    }
    return out;
}

FeatureSet FeatureSet::select(const std::vector<Column>& columns, const std::vector<std::vector<double>>& values,
                              std::span<const std::size_t> predictors, std::span<const std::size_t> rows)
{
    FeatureSet features;
    features.columns.reserve(predictors.size());
    for (auto j : predictors) {
        std::vector<double> column(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            column[r] = values[j][rows[r]];
        }
        features.columns.push_back(std::move(column));
        features.level_counts.push_back(columns[j].kind.is_categorical() ? columns[j].kind.level_count() : 0);
    }
    return features;
}

}  // namespace imputekit
