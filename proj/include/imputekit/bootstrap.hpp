#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "imputekit/csv.hpp"
#include "imputekit/dataset.hpp"
#include "imputekit/error.hpp"
#include "imputekit/imputer.hpp"

namespace imputekit {

/// A named statistic of a completed dataset. Must be deterministic.
struct Estimator
{
    std::string name;
    std::function<double(const CompletedDataset&)> fn;

    double operator()(const CompletedDataset& ds) const { return fn(ds); }

    // Linear-interpolation alpha-quantile of column j.
    static Estimator quantile(std::size_t j, double alpha);
    static Estimator mean(std::size_t j);
    // OLS slope (with intercept) of column y on column x.
    static Estimator slope(std::size_t y, std::size_t x);
};

/// Raised when the estimator fails on a bootstrap replicate.
class ReplicateError : public Error
{
  public:
    ReplicateError(const std::string& what, std::size_t replicate) : Error(what), replicate_(replicate) {}
    std::size_t replicate() const { return replicate_; }

  private:
    std::size_t replicate_;
};

struct BootstrapOptions
{
    std::size_t replicates = 30;  // L
    double alpha = 0.05;          // interval level 1 - alpha
    std::size_t m = 5;            // completions per imputation for stochastic imputers
    std::size_t jobs = 1;
};

struct BootstrapResult
{
    double theta_hat = 0.0;
    std::vector<double> replicates;
    double sigma_star = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// sqrt((1/L) sum_l (theta_hat - replicate_l)^2), centered at theta_hat.
double bootstrap_sigma(double theta_hat, std::span<const double> replicates);

/// Standard normal quantile function.
double normal_quantile(double p);

/// theta_hat +- q_{1-alpha/2} * sigma_star from fixed replicates.
BootstrapResult normal_interval(double theta_hat, std::vector<double> replicates, double alpha);

/*!
 * Bootstrap confidence interval for an imputation-based estimate.
 *
 * theta_hat is the mean of the estimator over the completions of `ds`. Each
 * of the L replicates resamples the rows of `ds` (with their mask rows) with
 * replacement, imputes the resample with a fresh seed, and averages the
 * estimator over its completions.
 */
BootstrapResult bootstrap_ci(const MaskedDataset& ds, const Imputer& imputer, const Estimator& estimator,
                             const BootstrapOptions& options, std::uint64_t seed);

/// Produces the dataset for one simulation from its seed.
using DatasetGenerator = std::function<MaskedDataset(std::uint64_t seed)>;

struct CoverageConfig
{
    std::size_t simulations = 200;  // B
    BootstrapOptions bootstrap;     // its `jobs` is ignored; see `jobs` below
    std::uint64_t seed = 1;
    // Parallelism over (simulation, imputer) pairs.
    std::size_t jobs = 1;
    // Share of failed simulations per imputer above which the run fails.
    double max_exclusion_rate = 0.05;
};

struct CoverageRow
{
    std::string method;
    std::size_t replication = 0;
    BootstrapResult result;
    bool covered = false;
    double width() const { return result.upper - result.lower; }
};

struct CoverageSummary
{
    std::string method;
    double coverage = 0.0;
    double mean_width = 0.0;
    std::size_t exclusions = 0;
};

struct CoverageResult
{
    std::vector<CoverageRow> rows;  // by imputer, then replication
    std::vector<CoverageSummary> summary;
    std::vector<std::string> failures;  // one message per excluded run
};

/*!
 * Repeated simulation of bootstrap intervals: B fresh datasets, one interval
 * per imputer on each, and the share of intervals containing `true_value`.
 * Failed simulations are excluded and counted; too many fail the run.
 */
CoverageResult coverage_experiment(const DatasetGenerator& generator, double true_value,
                                   std::span<const Imputer> imputers, const Estimator& estimator,
                                   const CoverageConfig& config);

/// Rows: method, replication, theta_hat, ci_lower, ci_upper, covered, width.
CsvTable coverage_table(const CoverageResult& result);
/// Rows: method, coverage, mean_width, exclusions.
CsvTable coverage_summary_table(const CoverageResult& result);

}  // namespace imputekit
