#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "helpers.hpp"
#include "imputekit/benchmarks.hpp"
#include "imputekit/error.hpp"
#include "imputekit/imputer.hpp"

using namespace imputekit;

namespace {

double mean_of(std::span<const double> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double covariance(std::span<const double> a, std::span<const double> b)
{
    const double ma = mean_of(a), mb = mean_of(b);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += (a[i] - ma) * (b[i] - mb);
    }
    return s / static_cast<double>(a.size() - 1);
}

// Bin edges at the empirical quantiles of `x`.
std::vector<std::size_t> quantile_bins(std::span<const double> x, std::size_t bins)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<std::size_t> bin(x.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        bin[order[r]] = r * bins / order.size();
    }
    return bin;
}

// Pearson chi-square of a 2 x k table of (missing, bin) counts.
double independence_chi2(const std::vector<bool>& missing, const std::vector<std::size_t>& bin, std::size_t bins)
{
    std::vector<double> miss(bins, 0.0), total(bins, 0.0);
    double all_miss = 0.0;
    for (std::size_t i = 0; i < missing.size(); ++i) {
        total[bin[i]] += 1.0;
        miss[bin[i]] += missing[i] ? 1.0 : 0.0;
        all_miss += missing[i] ? 1.0 : 0.0;
    }
    const double p = all_miss / static_cast<double>(missing.size());
    double chi2 = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        const double e1 = total[b] * p, e0 = total[b] * (1.0 - p);
        chi2 += (miss[b] - e1) * (miss[b] - e1) / e1 + (total[b] - miss[b] - e0) * (total[b] - miss[b] - e0) / e0;
    }
    return chi2;
}

}  // namespace

TEST_CASE("sample quantile with linear interpolation")
{
    const std::vector<double> v{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
    CHECK(quantile_est(v, 0.1) == doctest::Approx(1.9));
    CHECK(quantile_est(v, 0.9) == doctest::Approx(9.1));
    CHECK_THROWS_AS(quantile_est(v, 0.0), ConfigError);
    CHECK_THROWS_AS(quantile_est(v, 1.0), ConfigError);
    CHECK(quantile_est(v, 0.5) == doctest::Approx(5.5));
    CHECK(quantile_est(std::vector<double>{4.0}, 0.3) == 4.0);
    CHECK_THROWS(quantile_est(std::vector<double>{}, 0.1));
}

TEST_CASE("slope estimates")
{
    const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    CHECK(slope_est(y, x) == doctest::Approx(2.0));
    CHECK_THROWS_AS(slope_est(y, std::vector<double>{1, 1, 1, 1}), Error);
}

TEST_CASE("gaussian example moments")
{
    const auto sim = gen_gaussian_example({.n = 100000, .miss_prob = 0.5, .seed = 2});
    const auto x1 = sim.full.values(0), x2 = sim.full.values(1);
    CHECK(std::abs(mean_of(x1)) < 0.015);
    CHECK(covariance(x1, x1) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(covariance(x2, x2) == doctest::Approx(3.0).epsilon(0.02));
    const double corr = covariance(x1, x2) / std::sqrt(covariance(x1, x1) * covariance(x2, x2));
    CHECK(std::abs(corr - 1.0 / std::sqrt(3.0)) < 0.01);
    CHECK(sim.masked.missing_count(1) == 0);
    CHECK(std::abs(static_cast<double>(sim.masked.missing_count(0)) / 100000.0 - 0.5) < 0.01);
    // The masked copy agrees with the full data wherever it is observed.
    for (std::size_t i = 0; i < 1000; ++i) {
        if (!sim.masked.is_missing(i, 0)) {
            CHECK(sim.masked.values(0)[i] == x1[i]);
        }
    }
}

TEST_CASE("gaussian example is missing completely at random")
{
    // Missingness of X1 against quintiles of X2 and of X1 itself; chi2(4)
    // critical value at the 0.001 level is 18.47.
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto sim = gen_gaussian_example({.n = 5000, .miss_prob = 0.5, .seed = seed});
        std::vector<bool> missing(sim.full.rows());
        for (std::size_t i = 0; i < missing.size(); ++i) {
            missing[i] = sim.masked.is_missing(i, 0);
        }
        CHECK(independence_chi2(missing, quantile_bins(sim.full.values(1), 5), 5) < 18.47);
        CHECK(independence_chi2(missing, quantile_bins(sim.full.values(0), 5), 5) < 18.47);
    }
}

TEST_CASE("uniform example marginals and copula")
{
    const auto sim = gen_uniform_example({.n = 100000, .d = 5, .seed = 3});
    REQUIRE(sim.full.cols() == 5);
    CHECK(sim.full.column(0).name == "X1");
    CHECK(sim.full.column(4).name == "X5");
    for (std::size_t j = 0; j < 5; ++j) {
        const auto x = sim.full.values(j);
        CHECK(*std::min_element(x.begin(), x.end()) >= 0.0);
        CHECK(*std::max_element(x.begin(), x.end()) <= 1.0);
        CHECK(std::abs(mean_of(x) - 0.5) < 0.005);
        CHECK(covariance(x, x) == doctest::Approx(1.0 / 12.0).epsilon(0.02));
        if (j > 0) {
            CHECK(sim.masked.missing_count(j) == 0);
        }
    }
    // Pearson correlation of Gaussian-copula uniforms is the Spearman
    // correlation of the latent normals, (6 / pi) asin(rho / 2).
    const double expected = 6.0 / std::numbers::pi * std::asin(0.95 / 2.0);
    const double corr = covariance(sim.full.values(0), sim.full.values(1)) * 12.0;
    CHECK(std::abs(corr - expected) < 0.005);
    CHECK(std::abs(covariance(sim.full.values(0), sim.full.values(2)) * 12.0) < 0.015);
}

TEST_CASE("uniform example missingness follows the propensity")
{
    for (double scale : {1.0 / 32.0, 1.0 / 16.0}) {
        UniformExampleConfig cfg{.n = 20000, .d = 5, .copula_rho = 0.95, .propensity_scale = scale,
                                 .propensity_slope = 2.0, .seed = 4};
        const auto sim = gen_uniform_example(cfg);
        const auto x2 = sim.full.values(1);
        const auto bins = quantile_bins(x2, 10);
        std::vector<double> observed(10, 0.0), expected(10, 0.0), variance(10, 0.0);
        for (std::size_t i = 0; i < cfg.n; ++i) {
            const double p = scale * (2.0 * x2[i] + 14.0);
            expected[bins[i]] += p;
            variance[bins[i]] += p * (1.0 - p);
            observed[bins[i]] += sim.masked.is_missing(i, 0) ? 0.0 : 1.0;
        }
        // Sum of squared standardized deviations per bin ~ chi2(10);
        // 29.59 is the 0.001 critical value.
        double chi2 = 0.0;
        for (std::size_t b = 0; b < 10; ++b) {
            chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) / variance[b];
        }
        CHECK(chi2 < 29.59);
        const double rate = static_cast<double>(sim.masked.missing_count(0)) / static_cast<double>(cfg.n);
        CHECK(std::abs(rate - (1.0 - 15.0 * scale)) < 0.012);
    }
}

TEST_CASE("uniform example missingness is independent of other columns given X2")
{
    // Within 20 thin X2 strata, missingness against the within-stratum halves
    // of X1 and of X3; each 2 x 2 table gives chi2(1), summed: chi2(20),
    // 0.001 critical value 45.31.
    const auto sim = gen_uniform_example({.n = 20000, .d = 5, .seed = 5});
    const auto strata = quantile_bins(sim.full.values(1), 20);
    for (std::size_t other : {0u, 2u}) {
        double chi2 = 0.0;
        for (std::size_t s = 0; s < 20; ++s) {
            std::vector<bool> missing;
            std::vector<double> x;
            for (std::size_t i = 0; i < sim.full.rows(); ++i) {
                if (strata[i] == s) {
                    missing.push_back(sim.masked.is_missing(i, 0));
                    x.push_back(sim.full.values(other)[i]);
                }
            }
            chi2 += independence_chi2(missing, quantile_bins(x, 2), 2);
        }
        CHECK(chi2 < 45.31);
    }
}

TEST_CASE("generators are reproducible and validate their inputs")
{
    const auto a = gen_uniform_example({.n = 300, .seed = 6});
    const auto b = gen_uniform_example({.n = 300, .seed = 6});
    const auto c = gen_uniform_example({.n = 300, .seed = 7});
    CHECK(a.masked.mask() == b.masked.mask());
    for (std::size_t j = 0; j < a.full.cols(); ++j) {
        for (std::size_t i = 0; i < a.full.rows(); ++i) {
            CHECK(testing::same_bits(a.full.values(j)[i], b.full.values(j)[i]));
            CHECK(testing::same_bits(a.masked.values(j)[i], b.masked.values(j)[i]));
        }
    }
    CHECK(a.full.column_values() != c.full.column_values());
    CHECK_THROWS_AS(gen_uniform_example({.n = 300, .d = 1}), ConfigError);
    CHECK_THROWS_AS(gen_uniform_example({.n = 300, .propensity_scale = 0.1}), ConfigError);
    CHECK_THROWS_AS(gen_gaussian_example({.n = 300, .miss_prob = 1.0}), ConfigError);
}

TEST_CASE("complete-case oracle agrees with numerical integration")
{
    // Observed X1 has density (2 Phi(rho z / sqrt(2 - rho^2)) + 14) / 15 at
    // x = Phi(z); its 0.1 and 0.5 quantiles by quadrature.
    const UniformExampleConfig cfg;
    CHECK(std::abs(complete_case_oracle(cfg, 0.1, 4000000) - 0.10608735477924872) < 1e-3);
    CHECK(std::abs(complete_case_oracle(cfg, 0.5, 1000000) - 0.5156157710849264) < 2e-3);

    UniformExampleConfig flat = cfg;
    flat.propensity_slope = 0.0;
    CHECK(std::abs(complete_case_oracle(flat, 0.1, 4000000) - 0.1) < 1e-3);
    CHECK_THROWS_AS(complete_case_oracle(cfg, 0.1, 1000), ConfigError);
}

TEST_CASE("gaussian bench on a small scale")
{
    const std::vector<Imputer> imputers{Imputer::from_method(Method::MiceNormPredict, {.max_iter = 3}),
                                        Imputer::from_method(Method::MiceNormNob, {.max_iter = 3})};
    GaussianBenchConfig cfg;
    cfg.data.n = 400;
    cfg.reps = 3;
    cfg.m = 2;
    const auto result = run_gaussian_bench(imputers, cfg);
    REQUIRE(result.summary.size() == 3);
    CHECK(result.summary[0].method == "full-data");
    CHECK(result.summary[1].method == "mice-norm-predict");
    CHECK(result.rows.size() == 9);
    CHECK(result.example_completions.size() == 2);
    CHECK(result.example_full.rows() == 400);
    for (const auto& s : result.summary) {
        CHECK(s.reps == 3);
    }
    // Regression imputation inflates the X2-on-X1 slope.
    CHECK(result.summary[1].mean > result.summary[0].mean);

    cfg.jobs = 3;
    const auto threaded = run_gaussian_bench(imputers, cfg);
    CHECK(estimate_table(threaded.rows).str() == estimate_table(result.rows).str());
}

TEST_CASE("quantile bench on a small scale")
{
    const std::vector<Imputer> imputers{Imputer::from_method(Method::Knn),
                                        Imputer::from_method(Method::MiceCart, {.max_iter = 2})};
    QuantileBenchConfig cfg;
    cfg.data.n = 300;
    cfg.reps = 5;
    cfg.m = 2;
    const auto result = run_quantile_bench(imputers, cfg);
    CHECK(result.rows.size() == 10);
    REQUIRE(result.controls.size() == 2);
    CHECK(result.controls[0].method == "full-data");
    CHECK(result.controls[1].method == "complete-case");
    REQUIRE(result.summary.size() == 2);
    CHECK(std::abs(result.summary[0].mean - 0.1) <= std::abs(result.summary[1].mean - 0.1));
    cfg.reps = 4;
    CHECK_THROWS_AS(run_quantile_bench(imputers, cfg), ConfigError);
}

TEST_CASE("summary and estimate tables")
{
    const std::vector<EstimateRow> rows{{1, "knn", 0.125}};
    CHECK(estimate_table(rows).str() == "rep,method,estimate\n1,knn,0.125\n");
    const std::vector<MethodSummary> summary{{"knn", 0.125, 0.5, 3}};
    CHECK(summary_table(summary).str() == "method,mean,sd,reps\nknn,0.125,0.5,3\n");
}
