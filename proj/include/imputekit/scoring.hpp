#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "imputekit/csv.hpp"
#include "imputekit/dataset.hpp"
#include "imputekit/imputer.hpp"

namespace imputekit {

/*!
 * Energy score of a sample against one observation:
 * (1/N) sum_i |x_i - y| - (1/(2 N^2)) sum_i sum_j |x_i - x_j|, Euclidean
 * norm. Lower is better; the true predictive law minimizes its expectation.
 */
double energy_score(std::span<const std::vector<double>> sample, std::span<const double> truth);
double energy_score(std::span<const double> sample, double truth);

struct ColumnScore
{
    std::size_t column = 0;
    std::string name;
    double score = 0.0;  // mean energy score over the column's test rows
    std::size_t test_cells = 0;
};

struct ScoreEntry
{
    std::string method;
    double overall = 0.0;  // column scores weighted by test-cell counts
    std::vector<ColumnScore> columns;
    std::size_t imputations = 0;
    std::size_t masked_cells = 0;
};

struct IScoreOptions
{
    std::size_t imputations = 20;  // N
    double mask_fraction = 0.2;
    std::size_t jobs = 1;
};

/// Test cells the energy-I-Score would hold out: for each numeric column with
/// missing cells, ceil(fraction * observed) observed rows drawn uniformly.
MaskMatrix select_test_cells(const MaskedDataset& ds, double mask_fraction, RandomStream& rng);

/*!
 * Energy-I-Score of one imputer on a dataset with real missing values.
 *
 * Numeric columns are standardized with observed-cell statistics, extra
 * observed cells are held out (same cells for every method given the seed),
 * the imputer is run N times with independent seeds, and each test row's N
 * imputed vectors are scored against its held-out values.
 */
ScoreEntry iscore(const MaskedDataset& ds, const Imputer& imputer, const IScoreOptions& options, std::uint64_t seed);

struct Ranking
{
    std::vector<std::string> order;  // best (lowest score) first
    bool tied = false;               // some scores were equal; ties ordered by name
};

Ranking rank_methods(std::span<const ScoreEntry> entries);

/// Report rows: method, overall_score, column, column_score, n_test_cells.
CsvTable score_table(std::span<const ScoreEntry> entries);

}  // namespace imputekit
