#include "imputekit/cart.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "imputekit/error.hpp"

namespace imputekit {

namespace {

constexpr std::size_t kExhaustiveLevelLimit = 12;

/// Sufficient statistics of a set of targets for the impurity criterion.
/// For numeric targets one channel holds the sum; for categorical targets
/// there is one count per class. Impurity of a set is
/// sum_sq - purity() with purity = sum_c channel_c^2 / n.
struct Stats
{
    std::vector<double> channel;
    double count = 0.0;
    double sum_sq = 0.0;  // sum of y^2 (numeric) or count (categorical)

    explicit Stats(std::size_t channels) : channel(channels, 0.0) {}

    double purity() const
    {
        if (count == 0.0) {
            return 0.0;
        }
        double s = 0.0;
        for (double c : channel) {
            s += c * c;
        }
        return s / count;
    }
    double impurity() const { return sum_sq - purity(); }
};

struct SplitCandidate
{
    int feature = -1;
    double improvement = 0.0;
    double threshold = 0.0;
    std::vector<std::uint8_t> left_levels;
};

}  // namespace

class CartBuilder
{
  public:
    CartBuilder(const FeatureSet& features, const Target& target, const CartParams& params, RandomStream* rng)
        : features_(features), target_(target), params_(params), rng_(rng),
          channels_(target.categorical() ? target.level_count : 1), y_(target.values)
    {
        // Centering keeps the sum-of-squares arithmetic well conditioned.
        if (!target.categorical() && !y_.empty()) {
            const double mean = std::accumulate(y_.begin(), y_.end(), 0.0) / static_cast<double>(y_.size());
            for (auto& v : y_) {
                v -= mean;
            }
        }
    }

    CartTree build(std::vector<std::size_t> rows)
    {
        tree_.level_count_ = target_.level_count;
        const Stats root = stats_of(rows);
        threshold_ = params_.min_improvement * root.impurity();

        struct Work
        {
            std::uint32_t node;
            std::vector<std::size_t> rows;
            std::size_t depth;
        };
        std::vector<Work> stack;
        tree_.nodes_.emplace_back();
        stack.push_back({0, std::move(rows), 0});
        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();
            tree_.depth_ = std::max(tree_.depth_, work.depth);

            auto split = find_split(work.rows, work.depth);
            if (split.feature < 0) {
                make_leaf(work.node, work.rows);
                continue;
            }
            std::vector<std::size_t> left, right;
            left.reserve(work.rows.size());
            right.reserve(work.rows.size());
            for (auto r : work.rows) {
                (goes_left(split, features_.columns[split.feature][r]) ? left : right).push_back(r);
            }
            auto& node = tree_.nodes_[work.node];
            node.feature = split.feature;
            node.threshold = split.threshold;
            node.left_levels = std::move(split.left_levels);
            const auto left_id = static_cast<std::uint32_t>(tree_.nodes_.size());
            node.left = left_id;
            node.right = left_id + 1;
            tree_.nodes_.emplace_back();
            tree_.nodes_.emplace_back();
            // Right pushed first so the left subtree is laid out first.
            stack.push_back({left_id + 1, std::move(right), work.depth + 1});
            stack.push_back({left_id, std::move(left), work.depth + 1});
        }
        return std::move(tree_);
    }

  private:
    static bool goes_left(const SplitCandidate& split, double x)
    {
        if (!split.left_levels.empty()) {
            const auto level = static_cast<std::size_t>(x);
            return level < split.left_levels.size() && split.left_levels[level] != 0;
        }
        return x <= split.threshold;
    }

    void add(Stats& s, std::size_t row, double sign = 1.0) const
    {
        const double y = y_[row];
        s.count += sign;
        if (target_.categorical()) {
            s.channel[static_cast<std::size_t>(y)] += sign;
            s.sum_sq += sign;
        } else {
            s.channel[0] += sign * y;
            s.sum_sq += sign * y * y;
        }
    }

    Stats stats_of(const std::vector<std::size_t>& rows) const
    {
        Stats s(channels_);
        for (auto r : rows) {
            add(s, r);
        }
        return s;
    }

    void make_leaf(std::uint32_t node_id, const std::vector<std::size_t>& rows)
    {
        auto& node = tree_.nodes_[node_id];
        node.feature = -1;
        node.leaf = static_cast<std::uint32_t>(tree_.pools_.size());
        std::vector<double> pool;
        pool.reserve(rows.size());
        for (auto r : rows) {
            pool.push_back(target_.values[r]);
        }
        double prediction = 0.0;
        if (target_.categorical()) {
            std::vector<std::size_t> counts(target_.level_count, 0);
            for (double v : pool) {
                ++counts[static_cast<std::size_t>(v)];
            }
            prediction = static_cast<double>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        } else {
            prediction = std::accumulate(pool.begin(), pool.end(), 0.0) / static_cast<double>(pool.size());
        }
        tree_.pools_.push_back(std::move(pool));
        tree_.leaf_prediction_.push_back(prediction);
    }

    std::vector<std::size_t> candidate_features()
    {
        std::vector<std::size_t> all(features_.cols());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const std::size_t mtry = params_.mtry;
        if (mtry == 0 || mtry >= all.size()) {
            return all;
        }
        if (rng_ == nullptr) {
            throw FitError("feature subsampling requires a random stream");
        }
        for (std::size_t k = 0; k < mtry; ++k) {
            std::swap(all[k], all[k + rng_->index(all.size() - k)]);
        }
        all.resize(mtry);
        std::sort(all.begin(), all.end());
        return all;
    }

    SplitCandidate find_split(const std::vector<std::size_t>& rows, std::size_t depth)
    {
        SplitCandidate best;
        const std::size_t n = rows.size();
        if (n < 2 * params_.min_leaf || n < 2) {
            return best;
        }
        if (params_.max_depth > 0 && depth >= params_.max_depth) {
            return best;
        }
        const Stats parent = stats_of(rows);
        if (parent.impurity() <= 1e-12 * std::max(1.0, parent.sum_sq)) {
            return best;
        }
        for (auto f : candidate_features()) {
            if (features_.level_counts[f] > 0) {
                scan_categorical(rows, f, parent, best);
            } else {
                scan_numeric(rows, f, parent, best);
            }
        }
        if (best.feature >= 0 && (best.improvement <= 0.0 || best.improvement < threshold_)) {
            best.feature = -1;
        }
        return best;
    }

    void scan_numeric(const std::vector<std::size_t>& rows, std::size_t f, const Stats& parent,
                      SplitCandidate& best)
    {
        const auto& x = features_.columns[f];
        // Sorting (value, row) pairs directly is much faster than sorting
        // row indices through the column. Ties never separate, so their
        // order does not affect the split.
        auto& sorted = sort_buffer_;
        sorted.resize(rows.size());
        for (std::size_t k = 0; k < rows.size(); ++k) {
            sorted[k] = {x[rows[k]], rows[k]};
        }
        std::sort(sorted.begin(), sorted.end());

        const std::size_t n = sorted.size();
        const std::size_t min_leaf = std::max<std::size_t>(params_.min_leaf, 1);
        if (!target_.categorical()) {
            scan_numeric_target(f, parent, best, n, min_leaf);
            return;
        }
        Stats left(channels_);
        double left_sq = 0.0;  // sum of squared channels on the left
        std::vector<double> right_channel = parent.channel;
        double right_sq = 0.0;
        for (double c : right_channel) {
            right_sq += c * c;
        }
        const double parent_purity = parent.purity();
        for (std::size_t k = 0; k + 1 < n; ++k) {
            const std::size_t r = sorted[k].second;
            const double y = y_[r];
            const std::size_t ch = target_.categorical() ? static_cast<std::size_t>(y) : 0;
            const double delta = target_.categorical() ? 1.0 : y;
            left_sq += 2.0 * left.channel[ch] * delta + delta * delta;
            right_sq += -2.0 * right_channel[ch] * delta + delta * delta;
            left.channel[ch] += delta;
            right_channel[ch] -= delta;
            left.count += 1.0;

            const std::size_t n_left = k + 1;
            if (n_left < min_leaf || n - n_left < min_leaf) {
                continue;
            }
            const double x_here = sorted[k].first;
            const double x_next = sorted[k + 1].first;
            if (!(x_here < x_next)) {
                continue;
            }
            const double improvement = left_sq / static_cast<double>(n_left) +
                                       right_sq / static_cast<double>(n - n_left) - parent_purity;
            if (improvement > best.improvement) {
                best.feature = static_cast<int>(f);
                best.improvement = improvement;
                best.threshold = 0.5 * (x_here + x_next);
                // Guard against the midpoint rounding onto the upper value.
                if (!(best.threshold < x_next)) {
                    best.threshold = x_here;
                }
                best.left_levels.clear();
            }
        }
    }

    // Same scan as above for a numeric target, with scalar sums.
    void scan_numeric_target(std::size_t f, const Stats& parent, SplitCandidate& best, std::size_t n,
                             std::size_t min_leaf) const
    {
        const auto& sorted = sort_buffer_;
        const double total = parent.channel[0];
        const double parent_purity = parent.purity();
        double left_sum = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            left_sum += y_[sorted[k].second];
            const std::size_t n_left = k + 1;
            if (n_left < min_leaf || n - n_left < min_leaf) {
                continue;
            }
            const double x_here = sorted[k].first;
            const double x_next = sorted[k + 1].first;
            if (!(x_here < x_next)) {
                continue;
            }
            const double right_sum = total - left_sum;
            const double improvement = left_sum * left_sum / static_cast<double>(n_left) +
                                       right_sum * right_sum / static_cast<double>(n - n_left) - parent_purity;
            if (improvement > best.improvement) {
                best.feature = static_cast<int>(f);
                best.improvement = improvement;
                best.threshold = 0.5 * (x_here + x_next);
                if (!(best.threshold < x_next)) {
                    best.threshold = x_here;
                }
                best.left_levels.clear();
            }
        }
    }

    void scan_categorical(const std::vector<std::size_t>& rows, std::size_t f, const Stats& parent,
                          SplitCandidate& best) const
    {
        const auto& x = features_.columns[f];
        const std::size_t level_count = features_.level_counts[f];
        std::vector<Stats> per_level(level_count, Stats(channels_));
        for (auto r : rows) {
            add(per_level[static_cast<std::size_t>(x[r])], r);
        }
        std::vector<std::size_t> present;
        for (std::size_t l = 0; l < level_count; ++l) {
            if (per_level[l].count > 0) {
                present.push_back(l);
            }
        }
        if (present.size() < 2) {
            return;
        }
        const double parent_purity = parent.purity();
        const auto min_leaf = static_cast<double>(std::max<std::size_t>(params_.min_leaf, 1));

        auto evaluate = [&](const std::vector<std::uint8_t>& left_levels) {
            Stats left(channels_);
            for (auto l : present) {
                if (left_levels[l]) {
                    left.count += per_level[l].count;
                    for (std::size_t c = 0; c < channels_; ++c) {
                        left.channel[c] += per_level[l].channel[c];
                    }
                }
            }
            const double n_right = parent.count - left.count;
            if (left.count < min_leaf || n_right < min_leaf) {
                return;
            }
            double right_sq = 0.0;
            for (std::size_t c = 0; c < channels_; ++c) {
                const double rc = parent.channel[c] - left.channel[c];
                right_sq += rc * rc;
            }
            const double improvement = left.purity() + right_sq / n_right - parent_purity;
            if (improvement > best.improvement) {
                best.feature = static_cast<int>(f);
                best.improvement = improvement;
                best.threshold = 0.0;
                best.left_levels = left_levels;
            }
        };

        if (present.size() <= kExhaustiveLevelLimit) {
            // The last present level always goes right; every other subset is a
            // distinct bipartition.
            const std::size_t free_levels = present.size() - 1;
            for (std::uint32_t subset = 1; subset < (1u << free_levels); ++subset) {
                std::vector<std::uint8_t> left_levels(level_count, 0);
                for (std::size_t b = 0; b < free_levels; ++b) {
                    if (subset & (1u << b)) {
                        left_levels[present[b]] = 1;
                    }
                }
                evaluate(left_levels);
            }
            return;
        }

        // Many levels: order by mean target (numeric) or by the rate of the
        // node's modal class, then scan cut points along that order.
        std::size_t focus = 0;
        if (target_.categorical()) {
            focus = static_cast<std::size_t>(
                std::max_element(parent.channel.begin(), parent.channel.end()) - parent.channel.begin());
        }
        std::vector<double> key(level_count, 0.0);
        for (auto l : present) {
            key[l] = per_level[l].channel[focus] / per_level[l].count;
        }
        std::stable_sort(present.begin(), present.end(), [&key](std::size_t a, std::size_t b) { return key[a] < key[b]; });
        std::vector<std::uint8_t> left_levels(level_count, 0);
        for (std::size_t k = 0; k + 1 < present.size(); ++k) {
            left_levels[present[k]] = 1;
            evaluate(left_levels);
        }
    }

    const FeatureSet& features_;
    const Target& target_;
    const CartParams& params_;
    RandomStream* rng_;
    std::size_t channels_;
    std::vector<double> y_;
    double threshold_ = 0.0;
    std::vector<std::pair<double, std::size_t>> sort_buffer_;
    CartTree tree_;
};

CartTree fit_cart(const FeatureSet& features, const Target& target, const CartParams& params,
                  std::span<const std::size_t> sample, RandomStream* rng)
{
    if (features.rows() != target.values.size() && features.cols() > 0) {
        throw FitError("feature rows and target length differ");
    }
    std::vector<std::size_t> rows;
    if (sample.empty()) {
        rows.resize(target.values.size());
        std::iota(rows.begin(), rows.end(), std::size_t{0});
    } else {
        rows.assign(sample.begin(), sample.end());
    }
    if (rows.empty()) {
        throw FitError("cannot fit a tree on an empty set");
    }
    CartBuilder builder(features, target, params, rng);
    return builder.build(std::move(rows));
}

std::size_t CartTree::leaf_of(std::span<const double> x) const
{
    std::uint32_t id = 0;
    while (nodes_[id].feature >= 0) {
        const auto& node = nodes_[id];
        const double v = x[static_cast<std::size_t>(node.feature)];
        bool left;
        if (!node.left_levels.empty()) {
            const auto level = static_cast<std::size_t>(v);
            left = level < node.left_levels.size() && node.left_levels[level] != 0;
        } else {
            left = v <= node.threshold;
        }
        id = left ? node.left : node.right;
    }
    return nodes_[id].leaf;
}

std::span<const double> CartTree::route(std::span<const double> x) const
{
    return pools_[leaf_of(x)];
}

double CartTree::draw(std::span<const double> x, RandomStream& rng) const
{
    const auto pool = route(x);
    return pool[rng.index(pool.size())];
}

double CartTree::predict(std::span<const double> x) const
{
    return leaf_prediction_[leaf_of(x)];
}

}  // namespace imputekit
