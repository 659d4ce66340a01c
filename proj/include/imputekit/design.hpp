#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "imputekit/dataset.hpp"

namespace imputekit {

/*!
 * Linear-model encoding of predictor columns.
 *
 * Column 0 is the intercept. Numeric predictors contribute one column,
 * categorical predictors one indicator per non-reference level (the first
 * level is the reference).
 */
class DesignMatrix
{
  public:
    DesignMatrix() = default;
    explicit DesignMatrix(Eigen::MatrixXd x);

    // `values` is column-major over the full dataset; `predictors` picks the
    // columns and `rows` the observations to encode.
    static DesignMatrix encode(const std::vector<Column>& columns, const std::vector<std::vector<double>>& values,
                               std::span<const std::size_t> predictors, std::span<const std::size_t> rows);

    // Number of coefficients an encoding of `predictors` would have.
    static std::size_t coefficient_count(const std::vector<Column>& columns, std::span<const std::size_t> predictors);

    const Eigen::MatrixXd& matrix() const { return x_; }
    std::size_t rows() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(x_.cols()); }

  private:
    Eigen::MatrixXd x_;
};

/// Raw predictor columns for tree models; categorical cells are level indices.
struct FeatureSet
{
    std::vector<std::vector<double>> columns;
    std::vector<std::size_t> level_counts;  // 0 for numeric features

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    std::size_t cols() const { return columns.size(); }
    std::vector<double> row(std::size_t i) const;

    static FeatureSet select(const std::vector<Column>& columns, const std::vector<std::vector<double>>& values,
                             std::span<const std::size_t> predictors, std::span<const std::size_t> rows);
};

/// Target of a tree model; categorical targets hold level indices.
struct Target
{
    std::vector<double> values;
    std::size_t level_count = 0;  // 0 for numeric targets

    bool categorical() const { return level_count > 0; }
};

}  // namespace imputekit
