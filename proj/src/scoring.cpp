#include "imputekit/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "imputekit/error.hpp"
#include "imputekit/parallel.hpp"

namespace imputekit {

namespace {

double euclidean(std::span<const double> a, std::span<const double> b)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

}  // namespace

double energy_score(std::span<const std::vector<double>> sample, std::span<const double> truth)
{
    if (sample.empty()) {
        throw ConfigError("energy score needs at least one sample vector");
    }
    if (truth.empty()) {
        throw ConfigError("energy score needs dimension >= 1");
    }
    for (const auto& x : sample) {
        if (x.size() != truth.size()) {
            throw ConfigError("energy score: sample dimension " + std::to_string(x.size()) +
                              " does not match truth dimension " + std::to_string(truth.size()));
        }
    }
    const auto n = static_cast<double>(sample.size());
    double to_truth = 0.0;
    double pairwise = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        to_truth += euclidean(sample[i], truth);
        for (std::size_t j = i + 1; j < sample.size(); ++j) {
            pairwise += 2.0 * euclidean(sample[i], sample[j]);
        }
    }
    return to_truth / n - pairwise / (2.0 * n * n);
}

double energy_score(std::span<const double> sample, double truth)
{
    std::vector<std::vector<double>> vectors;
    vectors.reserve(sample.size());
    for (double x : sample) {
        vectors.push_back({x});
    }
    const double y[] = {truth};
    return energy_score(vectors, y);
}

MaskMatrix select_test_cells(const MaskedDataset& ds, double mask_fraction, RandomStream& rng)
{
    MaskMatrix test(ds.rows(), ds.cols());
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.column(j).kind.is_categorical() || ds.missing_count(j) == 0) {
            continue;
        }
        std::vector<std::size_t> observed;
        for (std::size_t i = 0; i < ds.rows(); ++i) {
            if (!ds.is_missing(i, j)) {
                observed.push_back(i);
            }
        }
        // The small slack keeps products like 0.1 * 100 from rounding up.
        const auto take = static_cast<std::size_t>(
            std::ceil(mask_fraction * static_cast<double>(observed.size()) - 1e-9));
        if (take >= observed.size()) {
            throw ConfigError("masking " + std::to_string(take) + " cells would empty column '" +
                              ds.column(j).name + "'");
        }
        for (std::size_t k = 0; k < take; ++k) {
            std::swap(observed[k], observed[k + rng.index(observed.size() - k)]);
            test.set(observed[k], j, true);
        }
    }
    return test;
}

ScoreEntry iscore(const MaskedDataset& ds, const Imputer& imputer, const IScoreOptions& options, std::uint64_t seed)
{
    if (options.imputations < 5) {
        throw ConfigError("energy-I-Score needs N >= 5 imputations");
    }
    if (!(options.mask_fraction > 0.0 && options.mask_fraction < 1.0)) {
        throw ConfigError("mask fraction must lie in (0, 1)");
    }
    if (ds.complete()) {
        throw ConfigError("energy-I-Score needs a dataset with missing values");
    }
    bool scorable = false;
    std::vector<double> shift(ds.cols(), 0.0), scale(ds.cols(), 1.0);
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (ds.column(j).kind.is_categorical()) {
            continue;
        }
        if (ds.missing_count(j) > 0) {
            if (ds.observed_count(j) < 20) {
                throw ConfigError("column '" + ds.column(j).name + "' has fewer than 20 observed cells");
            }
            scorable = true;
        }
        const auto stats = column_stats(ds, j);
        shift[j] = stats.center;
        if (stats.sd && *stats.sd > 0.0) {
            scale[j] = *stats.sd;
        }
    }
    if (!scorable) {
        throw ConfigError("no numeric column with missing values to score");
    }

    const auto standardized = ds.standardized(shift, scale);
    auto selection_rng = seed_tree(seed, {0});
    const auto test = select_test_cells(standardized, options.mask_fraction, selection_rng);
    const auto augmented = standardized.with_additional_missing(test);

    std::vector<CompletedDataset> runs(options.imputations);
    parallel_for(options.imputations, options.jobs, [&](std::size_t r) {
        runs[r] = imputer.impute(augmented, 1, subseed(seed, {1, r})).front();
    });

    std::vector<double> column_sum(ds.cols(), 0.0);
    std::vector<std::size_t> column_rows(ds.cols(), 0);
    std::vector<std::size_t> dims;
    std::vector<std::vector<double>> sample(options.imputations);
    std::vector<double> truth;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        dims.clear();
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            if (test(i, j)) {
                dims.push_back(j);
            }
        }
        if (dims.empty()) {
            continue;
        }
        truth.clear();
        for (auto j : dims) {
            truth.push_back(standardized.values(j)[i]);
        }
        for (std::size_t r = 0; r < runs.size(); ++r) {
            sample[r].clear();
            for (auto j : dims) {
                sample[r].push_back(runs[r].value(i, j));
            }
        }
        const double score = energy_score(sample, truth);
        for (auto j : dims) {
            column_sum[j] += score;
            ++column_rows[j];
        }
    }

    ScoreEntry entry;
    entry.method = imputer.name();
    entry.imputations = options.imputations;
    double weighted = 0.0;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (column_rows[j] == 0) {
            continue;
        }
        ColumnScore column;
        column.column = j;
        column.name = ds.column(j).name;
        column.test_cells = column_rows[j];
        column.score = column_sum[j] / static_cast<double>(column_rows[j]);
        weighted += column.score * static_cast<double>(column.test_cells);
        entry.masked_cells += column.test_cells;
        entry.columns.push_back(std::move(column));
    }
    entry.overall = weighted / static_cast<double>(entry.masked_cells);
    return entry;
}

Ranking rank_methods(std::span<const ScoreEntry> entries)
{
    std::vector<const ScoreEntry*> sorted;
    for (const auto& entry : entries) {
        sorted.push_back(&entry);
    }
    std::sort(sorted.begin(), sorted.end(), [](const ScoreEntry* a, const ScoreEntry* b) {
        if (a->overall != b->overall) {
            return a->overall < b->overall;
        }
        return a->method < b->method;
    });
    Ranking ranking;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        ranking.order.push_back(sorted[k]->method);
        if (k > 0 && sorted[k]->overall == sorted[k - 1]->overall) {
            ranking.tied = true;
        }
    }
    return ranking;
}

CsvTable score_table(std::span<const ScoreEntry> entries)
{
    CsvTable table({"method", "overall_score", "column", "column_score", "n_test_cells"});
    for (const auto& entry : entries) {
        for (const auto& column : entry.columns) {
            table.add_row({entry.method, format_number(entry.overall), column.name, format_number(column.score),
                           std::to_string(column.test_cells)});
        }
    }
    return table;
}

}  // namespace imputekit
