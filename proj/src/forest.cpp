#include "imputekit/forest.hpp"

#include <algorithm>
#include <cmath>

#include "imputekit/error.hpp"

namespace imputekit {

DonorForest::DonorForest(std::vector<CartTree> trees) : trees_(std::move(trees))
{
    if (trees_.empty()) {
        throw FitError("a forest needs at least one tree");
    }
}

double DonorForest::draw(std::span<const double> x, RandomStream& rng) const
{
    const auto& tree = trees_[rng.index(trees_.size())];
    return tree.draw(x, rng);
}

double DonorForest::predict(std::span<const double> x) const
{
    if (!trees_.front().categorical_target()) {
        double sum = 0.0;
        for (const auto& tree : trees_) {
            sum += tree.predict(x);
        }
        return sum / static_cast<double>(trees_.size());
    }
    std::vector<std::size_t> votes;
    for (const auto& tree : trees_) {
        const auto level = static_cast<std::size_t>(tree.predict(x));
        if (level >= votes.size()) {
            votes.resize(level + 1, 0);
        }
        ++votes[level];
    }
    return static_cast<double>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

std::size_t default_mtry(std::size_t feature_count)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(feature_count)))));
}

DonorForest fit_forest(const FeatureSet& features, const Target& target, const ForestParams& params,
                       RandomStream& rng)
{
    const std::size_t n = target.values.size();
    if (n == 0) {
        throw FitError("cannot fit a forest on an empty set");
    }
    if (params.n_trees == 0) {
        throw FitError("a forest needs at least one tree");
    }
    CartParams tree_params;
    tree_params.min_leaf = params.min_leaf;
    tree_params.min_improvement = 0.0;
    tree_params.mtry = params.mtry == 0 ? default_mtry(features.cols()) : params.mtry;

    std::vector<CartTree> trees;
    trees.reserve(params.n_trees);
    std::vector<std::size_t> sample(n);
    for (std::size_t t = 0; t < params.n_trees; ++t) {
        for (auto& s : sample) {
            s = rng.index(n);
        }
        trees.push_back(fit_cart(features, target, tree_params, sample, &rng));
    }
    return DonorForest(std::move(trees));
}

}  // namespace imputekit
