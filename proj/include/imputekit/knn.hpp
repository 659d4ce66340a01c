#pragma once

#include <cstddef>

#include "imputekit/dataset.hpp"

namespace imputekit {

struct KnnResult
{
    CompletedDataset completed;
    // Cells with no eligible neighbor, filled by the column mean/mode.
    std::size_t fallback_cells = 0;
};

/*!
 * Deterministic k-nearest-neighbor imputation.
 *
 * Row distances use the coordinates observed in both rows: numeric
 * differences scaled by the column's observed sd, categorical mismatches
 * counted as 1. The squared sum is rescaled by d / (shared coordinates), and
 * rows sharing no coordinate are not neighbors. Each missing cell takes the
 * mean (numeric) or mode (categorical; ties go to the level of the nearest
 * tied neighbor) of the k nearest rows observing that column. Distance ties
 * are broken by row index.
 */
KnnResult knn_impute(const MaskedDataset& ds, std::size_t k = 5);

}  // namespace imputekit
