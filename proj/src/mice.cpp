#include "imputekit/mice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imputekit/design.hpp"
#include "imputekit/error.hpp"
#include "imputekit/linear_model.hpp"
#include "imputekit/parallel.hpp"

namespace imputekit {

std::string to_string(MiceMethod method)
{
    switch (method) {
    case MiceMethod::Norm:
        return "norm";
    case MiceMethod::NormNob:
        return "norm_nob";
    case MiceMethod::NormPredict:
        return "norm_predict";
    case MiceMethod::Cart:
        return "cart";
    case MiceMethod::Rf:
        return "rf";
    }
    return "unknown";
}

std::vector<std::size_t> visit_order(const MaskedDataset& ds, VisitOrder policy)
{
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.missing_count(j) > 0) {
            order.push_back(j);
        }
    }
    if (policy == VisitOrder::IncreasingMissing) {
        std::stable_sort(order.begin(), order.end(),
                         [&ds](std::size_t a, std::size_t b) { return ds.missing_count(a) < ds.missing_count(b); });
    }
    return order;
}

std::vector<std::vector<double>> mean_mode_fill(const MaskedDataset& ds)
{
    auto values = ds.column_values();
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.missing_count(j) == 0) {
            continue;
        }
        const double fill = column_stats(ds, j).center;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (ds.is_missing(i, j)) {
                values[j][i] = fill;
            }
        }
    }
    return values;
}

std::size_t minimum_fit_rows(const MaskedDataset& ds, std::size_t j)
{
    std::vector<std::size_t> predictors;
    for (std::size_t k = 0; k < ds.cols(); ++k) {
        if (k != j) {
            predictors.push_back(k);
        }
    }
    return std::max<std::size_t>(10, DesignMatrix::coefficient_count(ds.columns(), predictors) + 2);
}

namespace {

/// Per-target bookkeeping shared by all chains.
struct TargetPlan
{
    std::size_t column;
    std::vector<std::size_t> observed_rows;
    std::vector<std::size_t> missing_rows;
    std::vector<std::size_t> predictors;  // empty under the small-sample fallback
    bool fallback = false;
};

std::vector<double> impute_column(const MaskedDataset& ds, const std::vector<std::vector<double>>& work,
                                  const TargetPlan& plan, const MiceConfig& config, RandomStream& rng)
{
    const auto& columns = ds.columns();
    const auto& kind = columns[plan.column].kind;
    const auto& target_values = work[plan.column];
    const std::size_t n_obs = plan.observed_rows.size();

    const bool linear = kind.is_numeric() && config.method != MiceMethod::Cart && config.method != MiceMethod::Rf &&
                        n_obs > DesignMatrix::coefficient_count(columns, plan.predictors);
    if (linear) {
        std::vector<double> y(n_obs);
        for (std::size_t r = 0; r < n_obs; ++r) {
            y[r] = target_values[plan.observed_rows[r]];
        }
        const auto x_fit = DesignMatrix::encode(columns, work, plan.predictors, plan.observed_rows);
        const auto x_new = DesignMatrix::encode(columns, work, plan.predictors, plan.missing_rows);
        const auto model = fit_linear(x_fit, y);
        switch (config.method) {
        case MiceMethod::Norm:
            return draw_norm_bayes(model, x_new, rng);
        case MiceMethod::NormNob:
            return draw_norm_nob(model, x_new, rng);
        default:
            return predict_norm(model, x_new);
        }
    }

    Target target;
    target.level_count = kind.level_count();
    target.values.resize(n_obs);
    for (std::size_t r = 0; r < n_obs; ++r) {
        target.values[r] = target_values[plan.observed_rows[r]];
    }
    const auto features = FeatureSet::select(columns, work, plan.predictors, plan.observed_rows);
    const auto new_rows = FeatureSet::select(columns, work, plan.predictors, plan.missing_rows);

    std::vector<double> out(plan.missing_rows.size());
    std::vector<double> x(plan.predictors.size());
    auto row_of = [&](std::size_t r) -> std::span<const double> {
        for (std::size_t f = 0; f < x.size(); ++f) {
            x[f] = new_rows.columns[f][r];
        }
        return x;
    };
    if (config.method == MiceMethod::Rf && !plan.fallback) {
        const auto forest = fit_forest(features, target, config.forest, rng);
        for (std::size_t r = 0; r < out.size(); ++r) {
            out[r] = forest.draw(row_of(r), rng);
        }
        return out;
    }
    const auto tree = fit_cart(features, target, config.cart, {}, &rng);
    for (std::size_t r = 0; r < out.size(); ++r) {
        out[r] = config.method == MiceMethod::NormPredict ? tree.predict(row_of(r)) : tree.draw(row_of(r), rng);
    }
    return out;
}

struct ChainResult
{
    std::vector<std::vector<double>> values;
    std::vector<ChainMean> means;
    std::size_t fits = 0;
};

ChainResult run_chain(const MaskedDataset& ds, const std::vector<TargetPlan>& plans, const MiceConfig& config,
                      std::size_t chain)
{
    ChainResult result;
    result.values = mean_mode_fill(ds);
    auto rng = seed_tree(config.seed, {static_cast<std::uint64_t>(chain)});

    auto record = [&](std::size_t iteration) {
        for (const auto& plan : plans) {
            if (ds.column(plan.column).kind.is_categorical()) {
                continue;
            }
            double sum = 0.0;
            for (auto r : plan.missing_rows) {
                sum += result.values[plan.column][r];
            }
            result.means.push_back(
                {chain, iteration, plan.column, sum / static_cast<double>(plan.missing_rows.size())});
        }
    };
    record(0);

    for (std::size_t iteration = 1; iteration <= config.max_iter; ++iteration) {
        for (const auto& plan : plans) {
            std::vector<double> filled;
            try {
                filled = impute_column(ds, result.values, plan, config, rng);
            } catch (const FitError& e) {
                throw FitError("column '" + ds.column(plan.column).name + "', cycle " + std::to_string(iteration) +
                               ": " + e.what());
            }
            ++result.fits;
            for (std::size_t r = 0; r < plan.missing_rows.size(); ++r) {
                result.values[plan.column][plan.missing_rows[r]] = filled[r];
            }
        }
        record(iteration);
    }
    return result;
}

}  // namespace

MultipleImputation mice_impute(const MaskedDataset& ds, const MiceConfig& config)
{
    if (config.m < 1) {
        throw ConfigError("mice needs m >= 1");
    }
    if (config.max_iter < 1) {
        throw ConfigError("mice needs max_iter >= 1");
    }

    std::vector<TargetPlan> plans;
    for (auto j : visit_order(ds, config.visit_order)) {
        TargetPlan plan;
        plan.column = j;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            (ds.is_missing(i, j) ? plan.missing_rows : plan.observed_rows).push_back(i);
        }
        for (std::size_t k = 0; k < ds.cols(); ++k) {
            if (k != j) {
                plan.predictors.push_back(k);
            }
        }
        const std::size_t needed = minimum_fit_rows(ds, j);
        if (plan.observed_rows.size() < needed) {
            if (config.strict) {
                throw ConfigError("column '" + ds.column(j).name + "' has " +
                                  std::to_string(plan.observed_rows.size()) + " observed rows; mice needs at least " +
                                  std::to_string(needed));
            }
            plan.predictors.clear();
            plan.fallback = true;
        }
        plans.push_back(std::move(plan));
    }

    MultipleImputation result;
    result.source_mask = ds.mask();
    for (const auto& plan : plans) {
        if (plan.fallback) {
            result.fallback_columns.push_back(plan.column);
        }
    }

    std::vector<ChainResult> chains(config.m);
    parallel_for(config.m, config.jobs, [&](std::size_t c) { chains[c] = run_chain(ds, plans, config, c); });

    result.completions.reserve(config.m);
    for (auto& chain : chains) {
        result.completions.emplace_back(ds, std::move(chain.values));
        result.chain_means.insert(result.chain_means.end(), chain.means.begin(), chain.means.end());
        result.model_fits += chain.fits;
    }
    return result;
}

}  // namespace imputekit
