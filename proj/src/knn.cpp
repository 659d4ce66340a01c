#include "imputekit/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "imputekit/error.hpp"

namespace imputekit {

KnnResult knn_impute(const MaskedDataset& ds, std::size_t k)
{
    if (k < 1) {
        throw ConfigError("knn needs k >= 1");
    }
    const std::size_t n = ds.rows();
    const std::size_t d = ds.cols();

    std::vector<double> scale(d, 1.0);
    std::vector<double> fill(d, 0.0);
    std::vector<bool> categorical(d, false);
    for (std::size_t j = 0; j < d; ++j) {
        const auto stats = column_stats(ds, j);
        fill[j] = stats.center;
        categorical[j] = ds.column(j).kind.is_categorical();
        if (stats.sd && *stats.sd > 0.0) {
            scale[j] = *stats.sd;
        }
    }

    auto values = ds.column_values();
    KnnResult result;
    constexpr double kNoOverlap = std::numeric_limits<double>::infinity();
    std::vector<double> distance(n);
    std::vector<std::pair<double, std::size_t>> candidates;
    candidates.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        bool has_hole = false;
        for (std::size_t j = 0; j < d && !has_hole; ++j) {
            has_hole = ds.is_missing(i, j);
        }
        if (!has_hole) {
            continue;
        }
        for (std::size_t other = 0; other < n; ++other) {
            if (other == i) {
                distance[other] = kNoOverlap;
                continue;
            }
            double sum = 0.0;
            std::size_t shared = 0;
            for (std::size_t j = 0; j < d; ++j) {
                if (ds.is_missing(i, j) || ds.is_missing(other, j)) {
                    continue;
                }
                ++shared;
                const double a = ds.values(j)[i];
                const double b = ds.values(j)[other];
                if (categorical[j]) {
                    sum += a != b ? 1.0 : 0.0;
                } else {
                    const double diff = (a - b) / scale[j];
                    sum += diff * diff;
                }
            }
            distance[other] = shared == 0 ? kNoOverlap
                                          : std::sqrt(sum * static_cast<double>(d) / static_cast<double>(shared));
        }

        for (std::size_t j = 0; j < d; ++j) {
            if (!ds.is_missing(i, j)) {
                continue;
            }
            candidates.clear();
            for (std::size_t other = 0; other < n; ++other) {
                if (distance[other] != kNoOverlap && !ds.is_missing(other, j)) {
                    candidates.emplace_back(distance[other], other);
                }
            }
            if (candidates.empty()) {
                values[j][i] = fill[j];
                ++result.fallback_cells;
                continue;
            }
            const std::size_t take = std::min(k, candidates.size());
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                              candidates.end());
            if (!categorical[j]) {
                double sum = 0.0;
                for (std::size_t c = 0; c < take; ++c) {
                    sum += ds.values(j)[candidates[c].second];
                }
                values[j][i] = sum / static_cast<double>(take);
                continue;
            }
            std::vector<std::size_t> counts(ds.column(j).kind.level_count(), 0);
            for (std::size_t c = 0; c < take; ++c) {
                ++counts[static_cast<std::size_t>(ds.values(j)[candidates[c].second])];
            }
            const std::size_t top = *std::max_element(counts.begin(), counts.end());
            // Neighbors are in distance order: the first one holding a modal
            // level decides ties.
            for (std::size_t c = 0; c < take; ++c) {
                const double level = ds.values(j)[candidates[c].second];
                if (counts[static_cast<std::size_t>(level)] == top) {
                    values[j][i] = level;
                    break;
                }
            }
        }
    }
    result.completed = CompletedDataset(ds, std::move(values));
    return result;
}

}  // namespace imputekit
