#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "imputekit/cart.hpp"
#include "imputekit/dataset.hpp"
#include "imputekit/forest.hpp"

namespace imputekit {

enum class MiceMethod
{
    Norm,         // Bayesian linear draw
    NormNob,      // linear draw, coefficients fixed
    NormPredict,  // linear prediction, no noise
    Cart,         // donor draw from a CART leaf
    Rf,           // donor draw from a random tree's leaf
};

enum class VisitOrder
{
    IncreasingMissing,  // fewest missing cells first, ties by column index
    ColumnIndex,
};

struct MiceConfig
{
    MiceMethod method = MiceMethod::Cart;
    std::size_t m = 5;
    std::size_t max_iter = 10;
    VisitOrder visit_order = VisitOrder::IncreasingMissing;
    CartParams cart;
    ForestParams forest;
    std::uint64_t seed = 1;
    // Chains run concurrently on up to this many threads.
    std::size_t jobs = 1;
    // When false, a column whose fitting set is below max(10, q + 2) rows is
    // imputed from a predictor-free model instead of raising ConfigError.
    bool strict = true;
};

struct ChainMean
{
    std::size_t chain;
    std::size_t iteration;  // 0 is the mean/mode initialization
    std::size_t column;
    double mean;
};

struct MultipleImputation
{
    std::vector<CompletedDataset> completions;
    MaskMatrix source_mask;
    // Mean of the imputed cells of each incomplete numeric column, per
    // chain and iteration.
    std::vector<ChainMean> chain_means;
    std::size_t model_fits = 0;
    // Columns imputed without predictors because their fitting set was small.
    std::vector<std::size_t> fallback_columns;
};

/// Columns with missing cells, in the order a mice cycle visits them.
std::vector<std::size_t> visit_order(const MaskedDataset& ds, VisitOrder policy);

/// Column-major values with missing cells set to the observed mean (numeric)
/// or modal level (categorical).
std::vector<std::vector<double>> mean_mode_fill(const MaskedDataset& ds);

/// Smallest fitting set mice accepts for column j: max(10, q + 2).
std::size_t minimum_fit_rows(const MaskedDataset& ds, std::size_t j);

/*!
 * Multiple imputation by chained equations.
 *
 * Each of the m chains starts from the mean/mode fill, then for max_iter
 * cycles refits a conditional model of every incomplete column on all other
 * columns (current values, rows where the target is originally observed)
 * and refills its missing cells by drawing (or predicting, for
 * NormPredict). Chain c draws from the substream seed_tree(seed, {c}).
 *
 * Categorical targets always use a tree: CART draws for Norm, NormNob and
 * Cart, forest draws for Rf, and the leaf majority for NormPredict.
 */
MultipleImputation mice_impute(const MaskedDataset& ds, const MiceConfig& config);

std::string to_string(MiceMethod method);

}  // namespace imputekit
