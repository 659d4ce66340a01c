#include "imputekit/imputer.hpp"

#include <array>

#include "imputekit/error.hpp"
#include "imputekit/knn.hpp"
#include "imputekit/mice.hpp"
#include "imputekit/missforest.hpp"

namespace imputekit {

namespace {

constexpr std::array kMethods{Method::MiceNorm, Method::MiceNormNob, Method::MiceNormPredict, Method::MiceCart,
                              Method::MiceRf,   Method::Knn,         Method::MissForest};

std::vector<CompletedDataset> repeat(CompletedDataset completed, std::size_t m)
{
    return std::vector<CompletedDataset>(m, completed);
}

}  // namespace

std::span<const Method> all_methods()
{
    return kMethods;
}

std::string_view method_name(Method method)
{
    switch (method) {
    case Method::MiceNorm:
        return "mice-norm";
    case Method::MiceNormNob:
        return "mice-norm-nob";
    case Method::MiceNormPredict:
        return "mice-norm-predict";
    case Method::MiceCart:
        return "mice-cart";
    case Method::MiceRf:
        return "mice-rf";
    case Method::Knn:
        return "knn";
    case Method::MissForest:
        return "missforest";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name)
{
    for (auto method : kMethods) {
        if (method_name(method) == name) {
            return method;
        }
    }
    return std::nullopt;
}

bool is_stochastic(Method method)
{
    switch (method) {
    case Method::MiceNorm:
    case Method::MiceNormNob:
    case Method::MiceCart:
    case Method::MiceRf:
        return true;
    default:
        return false;
    }
}

Imputer::Imputer(std::string name, bool stochastic, Fn fn)
    : name_(std::move(name)), stochastic_(stochastic), fn_(std::move(fn))
{
}

std::vector<CompletedDataset> Imputer::impute(const MaskedDataset& ds, std::size_t m, std::uint64_t seed) const
{
    if (m < 1) {
        throw ConfigError("imputation needs m >= 1");
    }
    try {
        return fn_(ds, m, seed);
    } catch (const ConfigError& e) {
        throw ConfigError(name_ + ": " + e.what());
    } catch (const FitError& e) {
        throw FitError(name_ + ": " + e.what());
    }
}

std::optional<MiceConfig> mice_config(Method method, const ImputerSettings& settings)
{
    MiceConfig config;
    switch (method) {
    case Method::MiceNorm:
        config.method = MiceMethod::Norm;
        break;
    case Method::MiceNormNob:
        config.method = MiceMethod::NormNob;
        break;
    case Method::MiceNormPredict:
        config.method = MiceMethod::NormPredict;
        break;
    case Method::MiceCart:
        config.method = MiceMethod::Cart;
        break;
    case Method::MiceRf:
        config.method = MiceMethod::Rf;
        break;
    default:
        return std::nullopt;
    }
    config.max_iter = settings.max_iter;
    config.forest.n_trees = settings.n_trees;
    config.forest.min_leaf = settings.min_leaf;
    config.cart.min_leaf = settings.min_leaf;
    config.strict = settings.strict;
    return config;
}

Imputer Imputer::from_method(Method method, const ImputerSettings& settings)
{
    const std::string name(method_name(method));
    switch (method) {
    case Method::Knn:
        return Imputer(name, false, [settings](const MaskedDataset& ds, std::size_t m, std::uint64_t) {
            return repeat(knn_impute(ds, settings.k).completed, m);
        });
    case Method::MissForest:
        return Imputer(name, false, [settings](const MaskedDataset& ds, std::size_t m, std::uint64_t seed) {
            MissForestParams params;
            params.n_trees = settings.missforest_trees;
            params.min_leaf = settings.min_leaf;
            params.max_iter = settings.max_iter;
            params.seed = seed;
            return repeat(missforest_impute(ds, params).completed, m);
        });
    default:
        break;
    }

    const auto config = *mice_config(method, settings);
    const bool stochastic = is_stochastic(method);
    return Imputer(name, stochastic, [config, stochastic](const MaskedDataset& ds, std::size_t m, std::uint64_t seed) {
        auto cfg = config;
        cfg.seed = seed;
        cfg.m = stochastic ? m : 1;
        auto completions = mice_impute(ds, cfg).completions;
        if (!stochastic) {
            return repeat(std::move(completions.front()), m);
        }
        return completions;
    });
}

Imputer Imputer::identity()
{
    return Imputer("identity", false, [](const MaskedDataset& ds, std::size_t m, std::uint64_t) {
        return repeat(CompletedDataset::from_complete(ds), m);
    });
}

}  // namespace imputekit
