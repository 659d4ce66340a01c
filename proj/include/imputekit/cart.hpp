#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "imputekit/design.hpp"
#include "imputekit/rng.hpp"

namespace imputekit {

struct CartParams
{
    std::size_t min_leaf = 5;
    std::size_t max_depth = 0;  // 0: unlimited
    // A split must reduce total impurity by at least this fraction of the
    // root node's impurity.
    double min_improvement = 1e-4;
    // Features tried per split; 0 or >= feature count means all.
    std::size_t mtry = 0;
};

/*!
 * Binary regression/classification tree whose leaves keep the training
 * targets that reached them (donor pools).
 *
 * Numeric features split on `x <= threshold`; categorical features send a
 * subset of levels left. Impurity is SSE for numeric targets and Gini for
 * categorical ones.
 */
class CartTree
{
  public:
    struct Node
    {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        std::vector<std::uint8_t> left_levels;  // categorical splits only
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        std::uint32_t leaf = 0;  // index into donor pools when a leaf
    };

    // Leaf pool reached by `x` (one value per feature).
    std::span<const double> route(std::span<const double> x) const;
    std::size_t leaf_of(std::span<const double> x) const;

    // One donor drawn uniformly from the leaf reached by `x`.
    double draw(std::span<const double> x, RandomStream& rng) const;
    // Leaf mean, or the leaf's modal level (lowest index on ties).
    double predict(std::span<const double> x) const;

    bool categorical_target() const { return level_count_ > 0; }
    std::size_t leaf_count() const { return pools_.size(); }
    std::size_t depth() const { return depth_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::vector<double>>& pools() const { return pools_; }

  private:
    friend class CartBuilder;

    std::vector<Node> nodes_;
    std::vector<std::vector<double>> pools_;
    std::vector<double> leaf_prediction_;
    std::size_t level_count_ = 0;
    std::size_t depth_ = 0;
};

/*!
 * Fit a tree by greedy recursive partitioning.
 *
 * `sample` lists the training rows (repeats allowed, as in a bootstrap
 * sample); empty means every row once. `rng` is required only when
 * `params.mtry` restricts the features tried per split.
 */
CartTree fit_cart(const FeatureSet& features, const Target& target, const CartParams& params,
                  std::span<const std::size_t> sample = {}, RandomStream* rng = nullptr);

inline double draw_cart(const CartTree& tree, std::span<const double> x, RandomStream& rng)
{
    return tree.draw(x, rng);
}

}  // namespace imputekit
