#include "imputekit/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "imputekit/error.hpp"
#include "imputekit/parallel.hpp"

namespace imputekit {

namespace {

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

std::vector<Column> numeric_columns(std::size_t d)
{
    std::vector<Column> columns;
    for (std::size_t j = 0; j < d; ++j) {
        columns.push_back({"X" + std::to_string(j + 1), ColumnKind::numeric()});
    }
    return columns;
}

void check_uniform_config(const UniformExampleConfig& cfg)
{
    if (cfg.d < 2) {
        throw ConfigError("uniform example needs d >= 2");
    }
    if (!(cfg.copula_rho > -1.0 && cfg.copula_rho < 1.0)) {
        throw ConfigError("copula correlation must lie in (-1, 1)");
    }
    const double lo = cfg.propensity_scale * std::min(14.0, 14.0 + cfg.propensity_slope);
    const double hi = cfg.propensity_scale * std::max(14.0, 14.0 + cfg.propensity_slope);
    if (!(lo > 0.0 && hi <= 1.0)) {
        throw ConfigError("observation propensity must stay within (0, 1] for x2 in [0, 1]");
    }
}

// One draw of (X1, X2) and whether X1 is observed.
struct UniformDraw
{
    double x1, x2;
    bool observed;
};

UniformDraw draw_pair(const UniformExampleConfig& cfg, RandomStream& rng)
{
    const double z1 = rng.normal();
    const double z2 = cfg.copula_rho * z1 + std::sqrt(1.0 - cfg.copula_rho * cfg.copula_rho) * rng.normal();
    const double x2 = normal_cdf(z2);
    const double p_observed = cfg.propensity_scale * (cfg.propensity_slope * x2 + 14.0);
    return {normal_cdf(z1), x2, rng.uniform() < p_observed};
}

MethodSummary summarize(const std::string& method, std::span<const double> values)
{
    MethodSummary s;
    s.method = method;
    s.reps = values.size();
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::vector<MethodSummary> summarize_rows(std::span<const EstimateRow> rows, const std::vector<std::string>& methods)
{
    std::map<std::string, std::vector<double>> by_method;
    for (const auto& row : rows) {
        by_method[row.method].push_back(row.estimate);
    }
    std::vector<MethodSummary> out;
    for (const auto& method : methods) {
        out.push_back(summarize(method, by_method[method]));
    }
    return out;
}

double pooled(const std::vector<CompletedDataset>& completions, auto&& statistic)
{
    double sum = 0.0;
    for (const auto& c : completions) {
        sum += statistic(c);
    }
    return sum / static_cast<double>(completions.size());
}

}  // namespace

SimulatedData gen_gaussian_example(const GaussianExampleConfig& cfg)
{
    if (!(cfg.miss_prob > 0.0 && cfg.miss_prob < 1.0)) {
        throw ConfigError("missingness probability must lie in (0, 1)");
    }
    if (cfg.n < 2) {
        throw ConfigError("gaussian example needs n >= 2");
    }
    auto rng = seed_tree(cfg.seed, {0});
    std::vector<std::vector<double>> values(2, std::vector<double>(cfg.n));
    MaskMatrix mask(cfg.n, 2);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        values[0][i] = rng.normal();
        values[1][i] = values[0][i] + std::numbers::sqrt2 * rng.normal();
        mask.set(i, 0, rng.bernoulli(cfg.miss_prob));
    }
    auto columns = numeric_columns(2);
    SimulatedData out{MaskedDataset(columns, values), MaskedDataset(columns, values, mask)};
    return out;
}

SimulatedData gen_uniform_example(const UniformExampleConfig& cfg)
{
    check_uniform_config(cfg);
    if (cfg.n < 2) {
        throw ConfigError("uniform example needs n >= 2");
    }
    auto rng = seed_tree(cfg.seed, {0});
    std::vector<std::vector<double>> values(cfg.d, std::vector<double>(cfg.n));
    MaskMatrix mask(cfg.n, cfg.d);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        const auto draw = draw_pair(cfg, rng);
        values[0][i] = draw.x1;
        values[1][i] = draw.x2;
        for (std::size_t j = 2; j < cfg.d; ++j) {
            values[j][i] = rng.uniform();
        }
        mask.set(i, 0, !draw.observed);
    }
    auto columns = numeric_columns(cfg.d);
    SimulatedData out{MaskedDataset(columns, values), MaskedDataset(columns, values, mask)};
    return out;
}

double quantile_est(std::span<const double> values, double alpha)
{
    if (values.empty()) {
        throw ConfigError("quantile of an empty vector");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ConfigError("quantile level must lie in (0, 1)");
    }
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    const double h = static_cast<double>(v.size() - 1) * alpha;  // zero-based h - 1
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double complete_case_oracle(const UniformExampleConfig& cfg, double alpha, std::size_t n_oracle)
{
    check_uniform_config(cfg);
    if (n_oracle < 1'000'000) {
        throw ConfigError("complete-case oracle needs at least 10^6 draws");
    }
    auto rng = seed_tree(cfg.seed, {0x6f7261636c65});
    std::vector<double> observed;
    observed.reserve(n_oracle);
    for (std::size_t i = 0; i < n_oracle; ++i) {
        const auto draw = draw_pair(cfg, rng);
        if (draw.observed) {
            observed.push_back(draw.x1);
        }
    }
    return quantile_est(observed, alpha);
}

double slope_est(std::span<const double> y, std::span<const double> x)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw ConfigError("slope needs two equal-length vectors of length >= 2");
    }
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) {
        throw Error("slope undefined: regressor has zero variance");
    }
    return sxy / sxx;
}

double slope_est(const CompletedDataset& ds, std::size_t y_col, std::size_t x_col)
{
    if (ds.column(y_col).kind.is_categorical() || ds.column(x_col).kind.is_categorical()) {
        throw ConfigError("slope needs numeric columns");
    }
    return slope_est(ds.values(y_col), ds.values(x_col));
}

GaussianBenchResult run_gaussian_bench(std::span<const Imputer> imputers, const GaussianBenchConfig& cfg)
{
    if (cfg.reps < 1 || cfg.m < 1) {
        throw ConfigError("gaussian benchmark needs reps >= 1 and m >= 1");
    }
    std::vector<SimulatedData> data;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        auto gen = cfg.data;
        gen.seed = subseed(cfg.seed, {r, 0});
        data.push_back(gen_gaussian_example(gen));
    }

    const std::size_t k_count = imputers.size();
    std::vector<double> estimates(cfg.reps * k_count);
    std::vector<CompletedDataset> first(k_count);
    parallel_for(estimates.size(), cfg.jobs, [&](std::size_t index) {
        const std::size_t r = index / k_count;
        const std::size_t k = index % k_count;
        try {
            const auto completions = imputers[k].impute(data[r].masked, cfg.m, subseed(cfg.seed, {r, 1}));
            estimates[index] = pooled(completions, [](const CompletedDataset& c) { return slope_est(c, 1, 0); });
            if (r == 0) {
                first[k] = completions.front();
            }
        } catch (const Error& e) {
            throw Error("gaussian benchmark, replication " + std::to_string(r + 1) + ": " + e.what());
        }
    });

    GaussianBenchResult result;
    std::vector<std::string> methods{"full-data"};
    for (const auto& imp : imputers) {
        methods.push_back(imp.name());
    }
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        result.rows.push_back(
            {r + 1, "full-data", slope_est(data[r].full.values(1), data[r].full.values(0))});
        for (std::size_t k = 0; k < k_count; ++k) {
            result.rows.push_back({r + 1, imputers[k].name(), estimates[r * k_count + k]});
        }
    }
    result.summary = summarize_rows(result.rows, methods);
    result.example_full = data.front().full;
    for (std::size_t k = 0; k < k_count; ++k) {
        result.example_completions.emplace_back(imputers[k].name(), std::move(first[k]));
    }
    return result;
}

QuantileBenchResult run_quantile_bench(std::span<const Imputer> imputers, const QuantileBenchConfig& cfg)
{
    if (cfg.reps < 5) {
        throw ConfigError("quantile benchmark needs reps >= 5");
    }
    if (cfg.m < 1) {
        throw ConfigError("quantile benchmark needs m >= 1");
    }
    std::vector<SimulatedData> data;
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        auto gen = cfg.data;
        gen.seed = subseed(cfg.seed, {r, 0});
        data.push_back(gen_uniform_example(gen));
    }

    const std::size_t k_count = imputers.size();
    std::vector<double> estimates(cfg.reps * k_count);
    parallel_for(estimates.size(), cfg.jobs, [&](std::size_t index) {
        const std::size_t r = index / k_count;
        const std::size_t k = index % k_count;
        try {
            const auto completions = imputers[k].impute(data[r].masked, cfg.m, subseed(cfg.seed, {r, 1}));
            estimates[index] =
                pooled(completions, [&](const CompletedDataset& c) { return quantile_est(c.values(0), cfg.alpha); });
        } catch (const Error& e) {
            throw Error("quantile benchmark, replication " + std::to_string(r + 1) + ": " + e.what());
        }
    });

    QuantileBenchResult result;
    std::vector<std::string> methods;
    for (const auto& imp : imputers) {
        methods.push_back(imp.name());
    }
    for (std::size_t r = 0; r < cfg.reps; ++r) {
        for (std::size_t k = 0; k < k_count; ++k) {
            result.rows.push_back({r + 1, imputers[k].name(), estimates[r * k_count + k]});
        }
        const auto& masked = data[r].masked;
        std::vector<double> observed;
        for (std::size_t i = 0; i < masked.rows(); ++i) {
            if (!masked.is_missing(i, 0)) {
                observed.push_back(masked.values(0)[i]);
            }
        }
        result.control_rows.push_back({r + 1, "full-data", quantile_est(data[r].full.values(0), cfg.alpha)});
        result.control_rows.push_back({r + 1, "complete-case", quantile_est(observed, cfg.alpha)});
    }
    result.summary = summarize_rows(result.rows, methods);
    std::stable_sort(result.summary.begin(), result.summary.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.mean - cfg.alpha) < std::abs(b.mean - cfg.alpha);
    });
    result.controls = summarize_rows(result.control_rows, {"full-data", "complete-case"});
    return result;
}

CsvTable estimate_table(std::span<const EstimateRow> rows)
{
    CsvTable table({"rep", "method", "estimate"});
    for (const auto& row : rows) {
        table.add_row({std::to_string(row.rep), row.method, format_number(row.estimate)});
    }
    return table;
}

CsvTable summary_table(std::span<const MethodSummary> summary)
{
    CsvTable table({"method", "mean", "sd", "reps"});
    for (const auto& s : summary) {
        table.add_row({s.method, format_number(s.mean), format_number(s.sd), std::to_string(s.reps)});
    }
    return table;
}

}  // namespace imputekit
