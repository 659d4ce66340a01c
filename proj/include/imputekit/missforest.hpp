#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "imputekit/dataset.hpp"

namespace imputekit {

struct MissForestParams
{
    std::size_t n_trees = 100;
    std::size_t min_leaf = 5;
    std::size_t max_iter = 10;
    std::size_t mtry = 0;  // 0: ceil(sqrt(predictor count))
    std::uint64_t seed = 1;
};

struct MissForestResult
{
    CompletedDataset completed;
    std::size_t iterations = 0;
    // Normalized change of the imputed cells per iteration; NaN when the
    // dataset has no imputed cells of that kind.
    std::vector<double> numeric_change;
    std::vector<double> categorical_change;
};

/*!
 * Iterative forest imputation by prediction.
 *
 * Starts from the mean/mode fill and repeatedly refits a forest for each
 * incomplete column (fewest missing first) on all other columns, replacing
 * its missing cells with the forest prediction. Iteration stops after
 * max_iter, when the imputed values stop changing, or when the normalized
 * change grows for every variable kind present; in the last case the
 * previous iteration's values are returned.
 *
 * Numeric change is sum((new - old)^2) / sum(new^2) over imputed numeric
 * cells; categorical change is the fraction of imputed categorical cells
 * that switched level.
 */
MissForestResult missforest_impute(const MaskedDataset& ds, const MissForestParams& params = {});

}  // namespace imputekit
