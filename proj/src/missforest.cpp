#include "imputekit/missforest.hpp"

#include <cmath>
#include <limits>

#include "imputekit/design.hpp"
#include "imputekit/error.hpp"
#include "imputekit/forest.hpp"
#include "imputekit/mice.hpp"

namespace imputekit {

MissForestResult missforest_impute(const MaskedDataset& ds, const MissForestParams& params)
{
    if (params.max_iter < 1) {
        throw ConfigError("missForest needs max_iter >= 1");
    }
    const auto order = visit_order(ds, VisitOrder::IncreasingMissing);
    for (auto j : order) {
        const std::size_t needed = minimum_fit_rows(ds, j);
        if (ds.observed_count(j) < needed) {
            throw ConfigError("column '" + ds.column(j).name + "' has " + std::to_string(ds.observed_count(j)) +
                              " observed rows; missForest needs at least " + std::to_string(needed));
        }
    }

    MissForestResult result;
    auto current = mean_mode_fill(ds);
    auto previous = current;

    ForestParams forest_params;
    forest_params.n_trees = params.n_trees;
    forest_params.min_leaf = params.min_leaf;
    forest_params.mtry = params.mtry;

    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    bool has_numeric = false;
    bool has_categorical = false;
    for (auto j : order) {
        (ds.column(j).kind.is_categorical() ? has_categorical : has_numeric) = true;
    }

    for (std::size_t iteration = 1; iteration <= params.max_iter; ++iteration) {
        previous = current;
        for (auto j : order) {
            std::vector<std::size_t> observed, missing, predictors;
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                (ds.is_missing(i, j) ? missing : observed).push_back(i);
            }
            for (std::size_t k = 0; k < ds.cols(); ++k) {
                if (k != j) {
                    predictors.push_back(k);
                }
            }
            Target target;
            target.level_count = ds.column(j).kind.level_count();
            for (auto r : observed) {
                target.values.push_back(current[j][r]);
            }
            const auto features = FeatureSet::select(ds.columns(), current, predictors, observed);
            const auto new_rows = FeatureSet::select(ds.columns(), current, predictors, missing);
            auto rng = seed_tree(params.seed, {iteration, j});
            const auto forest = fit_forest(features, target, forest_params, rng);
            for (std::size_t r = 0; r < missing.size(); ++r) {
                current[j][missing[r]] = forest.predict(new_rows.row(r));
            }
        }

        double num = 0.0, den = 0.0;
        std::size_t switched = 0, categorical_cells = 0;
        for (auto j : order) {
            const bool categorical = ds.column(j).kind.is_categorical();
            for (std::size_t i = 0; i < ds.rows(); ++i) {
                if (!ds.is_missing(i, j)) {
                    continue;
                }
                if (categorical) {
                    ++categorical_cells;
                    switched += current[j][i] != previous[j][i] ? 1 : 0;
                } else {
                    const double diff = current[j][i] - previous[j][i];
                    num += diff * diff;
                    den += current[j][i] * current[j][i];
                }
            }
        }
        const double numeric_change = has_numeric ? (den > 0.0 ? num / den : (num > 0.0 ? 1.0 : 0.0)) : kNaN;
        const double categorical_change =
            has_categorical ? static_cast<double>(switched) / static_cast<double>(categorical_cells) : kNaN;
        result.numeric_change.push_back(numeric_change);
        result.categorical_change.push_back(categorical_change);
        result.iterations = iteration;

        const bool unchanged = (!has_numeric || numeric_change == 0.0) && (!has_categorical || categorical_change == 0.0);
        if (unchanged) {
            break;
        }
        if (iteration >= 2) {
            const std::size_t last = result.numeric_change.size() - 1;
            const bool numeric_grew = !has_numeric || numeric_change > result.numeric_change[last - 1];
            const bool categorical_grew = !has_categorical || categorical_change > result.categorical_change[last - 1];
            if (numeric_grew && categorical_grew) {
                current = std::move(previous);
                break;
            }
        }
    }
    result.completed = CompletedDataset(ds, std::move(current));
    return result;
}

}  // namespace imputekit
