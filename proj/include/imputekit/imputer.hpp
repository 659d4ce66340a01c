#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "imputekit/dataset.hpp"
#include "imputekit/mice.hpp"

namespace imputekit {

/// Registered imputation methods, named after the mice package convention.
enum class Method
{
    MiceNorm,
    MiceNormNob,
    MiceNormPredict,
    MiceCart,
    MiceRf,
    Knn,
    MissForest,
};

std::span<const Method> all_methods();
std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);
// Stochastic methods draw imputations; the others predict them.
bool is_stochastic(Method method);

struct ImputerSettings
{
    std::size_t max_iter = 10;
    std::size_t k = 5;
    std::size_t n_trees = 10;            // mice-rf forests
    std::size_t missforest_trees = 100;  // missForest forests
    std::size_t min_leaf = 5;
    bool strict = true;  // see MiceConfig::strict
};

/// Chained-equations configuration of a mice method; nullopt for the others.
std::optional<MiceConfig> mice_config(Method method, const ImputerSettings& settings = {});

/*!
 * A named imputation procedure: (dataset, m, seed) -> m completions.
 *
 * Deterministic imputers are run once and the completion repeated, so
 * callers can treat every imputer alike.
 */
class Imputer
{
  public:
    using Fn = std::function<std::vector<CompletedDataset>(const MaskedDataset&, std::size_t m, std::uint64_t seed)>;

    Imputer(std::string name, bool stochastic, Fn fn);

    static Imputer from_method(Method method, const ImputerSettings& settings = {});
    // Passes complete data through; fails on any missing cell.
    static Imputer identity();

    const std::string& name() const { return name_; }
    bool stochastic() const { return stochastic_; }
    std::vector<CompletedDataset> impute(const MaskedDataset& ds, std::size_t m, std::uint64_t seed) const;

  private:
    std::string name_;
    bool stochastic_;
    Fn fn_;
};

}  // namespace imputekit
