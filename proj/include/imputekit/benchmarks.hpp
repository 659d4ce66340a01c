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

/// X1 ~ N(0,1), X2 = X1 + N(0,2); X1 missing completely at random.
struct GaussianExampleConfig
{
    std::size_t n = 5000;
    double miss_prob = 0.5;
    std::uint64_t seed = 1;
};

/*!
 * Uniform marginals with a Gaussian copula between X1 and X2, X3..Xd
 * independent U(0,1). X1 is observed with probability
 * propensity_scale * (propensity_slope * x2 + 14), so it is missing at
 * random given the always-observed X2.
 */
struct UniformExampleConfig
{
    std::size_t n = 5000;
    std::size_t d = 5;
    double copula_rho = 0.95;
    double propensity_scale = 1.0 / 32.0;
    double propensity_slope = 2.0;
    std::uint64_t seed = 1;
};

struct SimulatedData
{
    MaskedDataset full;
    MaskedDataset masked;
};

SimulatedData gen_gaussian_example(const GaussianExampleConfig& cfg);
SimulatedData gen_uniform_example(const UniformExampleConfig& cfg);

/// Linear-interpolation sample quantile, h = (k - 1) alpha + 1.
double quantile_est(std::span<const double> values, double alpha);

/// Monte Carlo alpha-quantile of X1 among rows where it is observed.
double complete_case_oracle(const UniformExampleConfig& cfg, double alpha, std::size_t n_oracle);

/// OLS slope with intercept of column y on column x.
double slope_est(const CompletedDataset& ds, std::size_t y_col, std::size_t x_col);
double slope_est(std::span<const double> y, std::span<const double> x);

/// One estimate per (replication, method), pooled over the m completions.
struct EstimateRow
{
    std::size_t rep = 0;
    std::string method;
    double estimate = 0.0;
};

struct MethodSummary
{
    std::string method;
    double mean = 0.0;
    double sd = 0.0;
    std::size_t reps = 0;
};

struct GaussianBenchConfig
{
    GaussianExampleConfig data;  // its seed is replaced per replication
    std::size_t reps = 10;
    std::size_t m = 5;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct GaussianBenchResult
{
    std::vector<EstimateRow> rows;        // slope of X2 on X1
    std::vector<MethodSummary> summary;   // "full-data" control first, then methods
    // First replication, for plotting: full data and first completion per method.
    MaskedDataset example_full;
    std::vector<std::pair<std::string, CompletedDataset>> example_completions;
};

GaussianBenchResult run_gaussian_bench(std::span<const Imputer> imputers, const GaussianBenchConfig& cfg);

struct QuantileBenchConfig
{
    UniformExampleConfig data;  // its seed is replaced per replication
    std::size_t reps = 50;
    double alpha = 0.1;
    std::size_t m = 5;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct QuantileBenchResult
{
    std::vector<EstimateRow> rows;
    // Methods ordered by |mean - alpha|, closest first.
    std::vector<MethodSummary> summary;
    // Full-data and complete-case estimates on the same replications.
    std::vector<EstimateRow> control_rows;
    std::vector<MethodSummary> controls;
};

QuantileBenchResult run_quantile_bench(std::span<const Imputer> imputers, const QuantileBenchConfig& cfg);

/// Rows: rep, method, estimate.
CsvTable estimate_table(std::span<const EstimateRow> rows);
/// Rows: method, mean, sd, reps.
CsvTable summary_table(std::span<const MethodSummary> summary);

}  // namespace imputekit
