#include "imputekit/bootstrap.hpp"

#include <cmath>
#include <optional>

#include <boost/math/distributions/normal.hpp>

#include "imputekit/benchmarks.hpp"
#include "imputekit/parallel.hpp"

namespace imputekit {

Estimator Estimator::quantile(std::size_t j, double alpha)
{
    return {"quantile", [j, alpha](const CompletedDataset& ds) { return quantile_est(ds.values(j), alpha); }};
}

Estimator Estimator::mean(std::size_t j)
{
    return {"mean", [j](const CompletedDataset& ds) {
                double sum = 0.0;
                for (double v : ds.values(j)) {
                    sum += v;
                }
                return sum / static_cast<double>(ds.rows());
            }};
}

Estimator Estimator::slope(std::size_t y, std::size_t x)
{
    return {"slope", [y, x](const CompletedDataset& ds) { return slope_est(ds, y, x); }};
}

double bootstrap_sigma(double theta_hat, std::span<const double> replicates)
{
    if (replicates.empty()) {
        throw ConfigError("bootstrap sigma needs at least one replicate");
    }
    double sum = 0.0;
    for (double t : replicates) {
        sum += (theta_hat - t) * (theta_hat - t);
    }
    return std::sqrt(sum / static_cast<double>(replicates.size()));
}

double normal_quantile(double p)
{
    if (!(p > 0.0 && p < 1.0)) {
        throw ConfigError("normal quantile needs p in (0, 1)");
    }
    // Double-only evaluation: no long double promotion, so results do not
    // depend on the platform's long double format.
    using Policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
    return boost::math::quantile(boost::math::normal_distribution<double, Policy>(), p);
}

BootstrapResult normal_interval(double theta_hat, std::vector<double> replicates, double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("interval level alpha must lie in (0, 1)");
    }
    BootstrapResult result;
    result.theta_hat = theta_hat;
    result.sigma_star = bootstrap_sigma(theta_hat, replicates);
    result.replicates = std::move(replicates);
    const double half = normal_quantile(1.0 - alpha / 2.0) * result.sigma_star;
    result.lower = theta_hat - half;
    result.upper = theta_hat + half;
    return result;
}

namespace {

double pooled_estimate(const std::vector<CompletedDataset>& completions, const Estimator& estimator)
{
    double sum = 0.0;
    for (const auto& c : completions) {
        sum += estimator(c);
    }
    return sum / static_cast<double>(completions.size());
}

}  // namespace

BootstrapResult bootstrap_ci(const MaskedDataset& ds, const Imputer& imputer, const Estimator& estimator,
                             const BootstrapOptions& options, std::uint64_t seed)
{
    if (options.replicates < 2) {
        throw ConfigError("bootstrap needs L >= 2 replicates");
    }
    if (options.m < 1) {
        throw ConfigError("bootstrap needs m >= 1");
    }
    const std::size_t m = imputer.stochastic() ? options.m : 1;
    const double theta_hat = pooled_estimate(imputer.impute(ds, m, subseed(seed, {0})), estimator);

    std::vector<double> replicates(options.replicates);
    parallel_for(options.replicates, options.jobs, [&](std::size_t l) {
        auto rng = seed_tree(seed, {1, l});
        std::vector<std::size_t> rows(ds.rows());
        for (auto& r : rows) {
            r = rng.index(ds.rows());
        }
        const auto resample = ds.select_rows(rows);
        const auto completions = imputer.impute(resample, m, subseed(seed, {2, l}));
        try {
            replicates[l] = pooled_estimate(completions, estimator);
        } catch (const std::exception& e) {
            throw ReplicateError("estimator '" + estimator.name + "' failed on bootstrap replicate " +
                                     std::to_string(l + 1) + ": " + e.what(),
                                 l + 1);
        }
    });
    return normal_interval(theta_hat, std::move(replicates), options.alpha);
}

CoverageResult coverage_experiment(const DatasetGenerator& generator, double true_value,
                                   std::span<const Imputer> imputers, const Estimator& estimator,
                                   const CoverageConfig& config)
{
    if (config.simulations < 10) {
        throw ConfigError("coverage experiment needs B >= 10 simulations");
    }
    if (imputers.empty()) {
        throw ConfigError("coverage experiment needs at least one imputer");
    }
    const std::size_t b_count = config.simulations;
    auto options = config.bootstrap;
    options.jobs = 1;

    // Datasets are generated lazily inside the jobs; each simulation's
    // generator seed depends only on b.
    struct Outcome
    {
        std::optional<BootstrapResult> result;
        std::string failure;
    };
    std::vector<Outcome> outcomes(imputers.size() * b_count);
    parallel_for(outcomes.size(), config.jobs, [&](std::size_t index) {
        const std::size_t k = index / b_count;
        const std::size_t b = index % b_count;
        auto& out = outcomes[index];
        try {
            const auto ds = generator(subseed(config.seed, {b, 0}));
            out.result = bootstrap_ci(ds, imputers[k], estimator, options, subseed(config.seed, {b, 1, k}));
        } catch (const Error& e) {
            out.failure = imputers[k].name() + ", replication " + std::to_string(b + 1) + ": " + e.what();
        }
    });

    CoverageResult result;
    for (std::size_t k = 0; k < imputers.size(); ++k) {
        CoverageSummary summary;
        summary.method = imputers[k].name();
        std::size_t covered = 0;
        double width = 0.0;
        for (std::size_t b = 0; b < b_count; ++b) {
            auto& out = outcomes[k * b_count + b];
            if (!out.result) {
                ++summary.exclusions;
                result.failures.push_back(std::move(out.failure));
                continue;
            }
            CoverageRow row;
            row.method = summary.method;
            row.replication = b + 1;
            row.result = std::move(*out.result);
            row.covered = row.result.lower <= true_value && true_value <= row.result.upper;
            covered += row.covered ? 1 : 0;
            width += row.width();
            result.rows.push_back(std::move(row));
        }
        const std::size_t kept = b_count - summary.exclusions;
        if (static_cast<double>(summary.exclusions) > config.max_exclusion_rate * static_cast<double>(b_count) ||
            kept == 0) {
            std::string message = "coverage experiment: " + std::to_string(summary.exclusions) + " of " +
                                  std::to_string(b_count) + " simulations failed for " + summary.method;
            for (const auto& f : result.failures) {
                message += "\n  " + f;
            }
            throw Error(message);
        }
        summary.coverage = static_cast<double>(covered) / static_cast<double>(kept);
        summary.mean_width = width / static_cast<double>(kept);
        result.summary.push_back(summary);
    }
    return result;
}

CsvTable coverage_table(const CoverageResult& result)
{
    CsvTable table({"method", "replication", "theta_hat", "ci_lower", "ci_upper", "covered", "width"});
    for (const auto& row : result.rows) {
        table.add_row({row.method, std::to_string(row.replication), format_number(row.result.theta_hat),
                       format_number(row.result.lower), format_number(row.result.upper), row.covered ? "1" : "0",
                       format_number(row.width())});
    }
    return table;
}

CsvTable coverage_summary_table(const CoverageResult& result)
{
    CsvTable table({"method", "coverage", "mean_width", "exclusions"});
    for (const auto& s : result.summary) {
        table.add_row({s.method, format_number(s.coverage), format_number(s.mean_width), std::to_string(s.exclusions)});
    }
    return table;
}

}  // namespace imputekit
