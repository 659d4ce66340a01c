#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "imputekit/cart.hpp"

namespace imputekit {

struct ForestParams
{
    std::size_t n_trees = 10;
    std::size_t min_leaf = 5;
    std::size_t mtry = 0;  // 0: ceil(sqrt(feature count))
};

/// Trees fit on bootstrap resamples with per-split feature subsampling.
class DonorForest
{
  public:
    explicit DonorForest(std::vector<CartTree> trees);

    // Picks one tree uniformly, then one donor from the leaf `x` reaches.
    double draw(std::span<const double> x, RandomStream& rng) const;
    // Mean of tree predictions, or majority vote (lowest level on ties).
    double predict(std::span<const double> x) const;

    const std::vector<CartTree>& trees() const { return trees_; }

  private:
    std::vector<CartTree> trees_;
};

std::size_t default_mtry(std::size_t feature_count);

DonorForest fit_forest(const FeatureSet& features, const Target& target, const ForestParams& params,
                       RandomStream& rng);

inline double draw_forest(const DonorForest& forest, std::span<const double> x, RandomStream& rng)
{
    return forest.draw(x, rng);
}

}  // namespace imputekit
