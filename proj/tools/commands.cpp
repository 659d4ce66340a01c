#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "imputekit/benchmarks.hpp"
#include "imputekit/bootstrap.hpp"
#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"
#include "imputekit/imputer.hpp"
#include "imputekit/mice.hpp"
#include "imputekit/report.hpp"
#include "imputekit/scoring.hpp"

namespace imputekit::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kOracleDraws = 10'000'000;

/// Files written by one command; removed again if the command fails.
class Outputs
{
  public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& text)
    {
        if (!fs::exists(dir_)) {
            fs::create_directories(dir_);
            created_dir_ = true;
        }
        const auto path = dir_ / name;
        written_.push_back(path);
        write_text_file(path, text);
    }

    void rollback() noexcept
    {
        std::error_code ec;
        for (const auto& path : written_) {
            fs::remove(path, ec);
        }
        if (created_dir_ && fs::is_empty(dir_, ec)) {
            fs::remove(dir_, ec);
        }
        written_.clear();
    }

    const std::vector<fs::path>& written() const { return written_; }

  private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool created_dir_ = false;
};

ImputerSettings settings_of(const RunConfig& cfg)
{
    ImputerSettings s;
    s.max_iter = cfg.max_iter;
    s.k = cfg.k;
    s.n_trees = cfg.n_trees;
    s.missforest_trees = cfg.missforest_trees;
    s.strict = !cfg.allow_small_fits;
    return s;
}

Method method_of(const std::string& name)
{
    const auto method = parse_method(name);
    if (!method) {
        throw ConfigError("unknown method '" + name + "'");
    }
    return *method;
}

std::vector<Imputer> imputers_of(const RunConfig& cfg, const std::vector<std::string>& fallback)
{
    const auto& names = cfg.methods.empty() ? fallback : cfg.methods;
    std::vector<Imputer> out;
    for (const auto& name : names) {
        out.push_back(Imputer::from_method(method_of(name), settings_of(cfg)));
    }
    return out;
}

UniformExampleConfig uniform_config(const RunConfig& cfg)
{
    UniformExampleConfig u;
    u.n = cfg.n;
    u.d = cfg.d;
    return u;
}

std::string mask_csv(const MaskedDataset& ds)
{
    std::vector<std::string> header;
    for (const auto& c : ds.columns()) {
        header.push_back(c.name);
    }
    CsvTable table(header);
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            row.push_back(ds.is_missing(i, j) ? "1" : "0");
        }
        table.add_row(std::move(row));
    }
    return table.str();
}

void cmd_impute(const RunConfig& cfg, Outputs& outputs, std::ostream& out)
{
    if (cfg.input.empty()) {
        throw ConfigError("impute needs --input");
    }
    CsvOptions options;
    options.na_token = cfg.na_token;
    const auto ds = read_csv(cfg.input, options);
    const auto method = method_of(cfg.method);

    std::vector<CompletedDataset> completions;
    CsvTable chains({"chain", "iteration", "column", "mean"});
    std::vector<std::size_t> fallback_columns;
    if (auto mice = mice_config(method, settings_of(cfg))) {
        mice->seed = cfg.seed;
        mice->jobs = cfg.jobs;
        mice->m = is_stochastic(method) ? cfg.m : 1;
        auto result = mice_impute(ds, *mice);
        for (const auto& c : result.chain_means) {
            chains.add_row({std::to_string(c.chain + 1), std::to_string(c.iteration), ds.column(c.column).name,
                            format_number(c.mean)});
        }
        fallback_columns = result.fallback_columns;
        completions = std::move(result.completions);
        while (completions.size() < cfg.m) {
            completions.push_back(completions.front());
        }
    } else {
        completions = Imputer::from_method(method, settings_of(cfg)).impute(ds, cfg.m, cfg.seed);
    }

    for (std::size_t c = 0; c < completions.size(); ++c) {
        outputs.write("imp_" + std::to_string(c + 1) + ".csv", to_csv(completions[c]));
    }
    outputs.write("mask.csv", mask_csv(ds));
    outputs.write("chains.csv", chains.str());

    out << cfg.method << ": " << completions.size() << " completions of " << ds.rows() << " x " << ds.cols()
        << " written to " << cfg.output_dir.string() << "\n";
    for (auto j : fallback_columns) {
        out << "note: column '" << ds.column(j).name << "' was imputed without predictors (too few observed rows)\n";
    }
}

void cmd_score(const RunConfig& cfg, Outputs& outputs, std::ostream& out)
{
    MaskedDataset ds;
    if (cfg.input.empty()) {
        auto u = uniform_config(cfg);
        u.seed = subseed(cfg.seed, {0});
        ds = gen_uniform_example(u).masked;
    } else {
        CsvOptions options;
        options.na_token = cfg.na_token;
        ds = read_csv(cfg.input, options);
    }
    std::vector<std::string> all;
    for (auto m : all_methods()) {
        all.emplace_back(method_name(m));
    }
    const auto imputers = imputers_of(cfg, all);

    IScoreOptions options;
    options.imputations = cfg.N;
    options.mask_fraction = cfg.mask_fraction;
    options.jobs = cfg.jobs;
    std::vector<ScoreEntry> entries;
    for (const auto& imputer : imputers) {
        entries.push_back(iscore(ds, imputer, options, subseed(cfg.seed, {1})));
    }
    outputs.write("scores.csv", score_table(entries).str());

    const auto ranking = rank_methods(entries);
    out << "rank  method               energy-I-Score\n";
    for (std::size_t r = 0; r < ranking.order.size(); ++r) {
        const auto it = std::find_if(entries.begin(), entries.end(),
                                     [&](const ScoreEntry& e) { return e.method == ranking.order[r]; });
        std::ostringstream line;
        line << std::left << std::setw(6) << (r + 1) << std::setw(21) << it->method << format_number(it->overall);
        out << line.str() << "\n";
    }
    if (ranking.tied) {
        out << "note: some scores are tied; tied methods are listed alphabetically\n";
    }
}

void cmd_bench_gaussian(const RunConfig& cfg, Outputs& outputs, std::ostream& out)
{
    GaussianBenchConfig bench;
    bench.data.n = cfg.n;
    bench.reps = cfg.reps;
    bench.m = cfg.m;
    bench.seed = cfg.seed;
    bench.jobs = cfg.jobs;
    const auto imputers = imputers_of(cfg, {"mice-norm-predict", "mice-norm-nob"});
    const auto result = run_gaussian_bench(imputers, bench);

    outputs.write("gaussian_rows.csv", estimate_table(result.rows).str());
    outputs.write("gaussian_summary.csv", summary_table(result.summary).str());
    outputs.write("gaussian.svg", scatter_panels_svg(result.example_full, result.example_completions));
    for (const auto& s : result.summary) {
        out << s.method << ": mean slope " << format_number(s.mean) << " (sd " << format_number(s.sd) << ")\n";
    }
}

void cmd_bench_quantile(const RunConfig& cfg, Outputs& outputs, std::ostream& out)
{
    QuantileBenchConfig bench;
    bench.data = uniform_config(cfg);
    bench.reps = cfg.reps;
    bench.alpha = cfg.alpha;
    bench.m = cfg.m;
    bench.seed = cfg.seed;
    bench.jobs = cfg.jobs;
    const auto imputers = imputers_of(cfg, {"mice-cart", "mice-rf", "knn", "missforest"});
    const auto result = run_quantile_bench(imputers, bench);
    const double oracle = complete_case_oracle(bench.data, cfg.alpha, kOracleDraws);

    auto rows = result.rows;
    rows.insert(rows.end(), result.control_rows.begin(), result.control_rows.end());
    auto summary = result.summary;
    summary.insert(summary.end(), result.controls.begin(), result.controls.end());
    CsvTable oracle_table({"alpha", "complete_case_oracle", "draws"});
    oracle_table.add_row({format_number(cfg.alpha), format_number(oracle), std::to_string(kOracleDraws)});

    outputs.write("quantile_rows.csv", estimate_table(rows).str());
    outputs.write("quantile_summary.csv", summary_table(summary).str());
    outputs.write("quantile_oracle.csv", oracle_table.str());
    outputs.write("quantile.svg", quantile_strip_svg(result.rows, result.summary, cfg.alpha, oracle));
    for (const auto& s : summary) {
        out << s.method << ": mean " << format_number(s.mean) << " (sd " << format_number(s.sd) << ")\n";
    }
    out << "complete-case oracle: " << format_number(oracle) << "\n";
}

void cmd_bench_coverage(const RunConfig& cfg, Outputs& outputs, std::ostream& out)
{
    const auto data = uniform_config(cfg);
    const DatasetGenerator generator = [data](std::uint64_t seed) {
        auto u = data;
        u.seed = seed;
        return gen_uniform_example(u).masked;
    };
    CoverageConfig coverage;
    coverage.simulations = cfg.B;
    coverage.bootstrap.replicates = cfg.L;
    coverage.bootstrap.alpha = cfg.ci_alpha;
    coverage.bootstrap.m = cfg.m;
    coverage.seed = cfg.seed;
    coverage.jobs = cfg.jobs;
    const auto imputers = imputers_of(cfg, {"mice-cart", "mice-rf", "knn"});
    // X1 is marginally uniform, so its alpha-quantile is alpha itself.
    const auto result =
        coverage_experiment(generator, cfg.alpha, imputers, Estimator::quantile(0, cfg.alpha), coverage);

    outputs.write("coverage_rows.csv", coverage_table(result).str());
    outputs.write("coverage_summary.csv", coverage_summary_table(result).str());
    outputs.write("coverage.svg", coverage_svg(result, cfg.alpha));
    for (const auto& s : result.summary) {
        out << s.method << ": coverage " << format_number(s.coverage) << ", mean width "
            << format_number(s.mean_width) << ", exclusions " << s.exclusions << "\n";
    }
}

void add_common(CLI::App& cmd, RunConfig& cfg)
{
    cmd.add_option("--output-dir", cfg.output_dir, "Directory for output files")->capture_default_str();
    cmd.add_option("--seed", cfg.seed, "Root random seed")->capture_default_str();
    cmd.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--config", "Flat key=value file of option defaults; flags given here take precedence");
}

std::string trim(const std::string& s)
{
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return {};
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool given(const std::vector<std::string>& args, const std::string& key)
{
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

/*!
 * Splice the entries of a `--config` file into the argument list as
 * `--key=value` tokens, right after the subcommand names. Keys also given on
 * the command line are skipped so that flags win over the file.
 */
std::vector<std::string> expand_config(const std::vector<std::string>& args)
{
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 == args.size()) {
                throw ConfigError("--config needs a file name");
            }
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path) {
        return rest;
    }
    std::ifstream in(*path);
    if (!in) {
        throw ConfigError("cannot read config file '" + *path + "'");
    }
    std::vector<std::string> entries;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config file '" + *path + "', line " + std::to_string(number) + ": expected key=value");
        }
        auto key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) {
            key = key.substr(2);
        }
        if (key.empty()) {
            throw ConfigError("config file '" + *path + "', line " + std::to_string(number) + ": empty key");
        }
        if (!given(rest, key)) {
            entries.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
        }
    }
    std::size_t at = 0;
    while (at < rest.size() && rest[at].rfind("-", 0) != 0) {
        ++at;
    }
    rest.insert(rest.begin() + static_cast<std::ptrdiff_t>(at), entries.begin(), entries.end());
    return rest;
}

void add_imputer_options(CLI::App& cmd, RunConfig& cfg)
{
    cmd.add_option("--m", cfg.m, "Completions per imputation")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--max-iter", cfg.max_iter, "Iterations of mice / missForest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_option("--k", cfg.k, "Neighbours for knn")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--trees", cfg.n_trees, "Trees per mice-rf forest")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--missforest-trees", cfg.missforest_trees, "Trees per missForest forest")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

CLI::Validator method_validator()
{
    return CLI::Validator(
        [](std::string& name) {
            if (parse_method(name)) {
                return std::string();
            }
            std::string known;
            for (auto m : all_methods()) {
                known += (known.empty() ? "" : ", ") + std::string(method_name(m));
            }
            return "unknown method '" + name + "' (known: " + known + ")";
        },
        "METHOD");
}

void add_methods(CLI::App& cmd, RunConfig& cfg)
{
    cmd.add_option("--methods", cfg.methods, "Comma-separated imputation methods")
        ->delimiter(',')
        ->check(method_validator());
}

void add_data_shape(CLI::App& cmd, RunConfig& cfg)
{
    cmd.add_option("--n", cfg.n, "Rows per simulated dataset")->check(CLI::PositiveNumber)->capture_default_str();
    cmd.add_option("--d", cfg.d, "Columns of the uniform example")->check(CLI::Range(2, 1'000'000))->capture_default_str();
}

CLI::Option* add_fraction(CLI::App& cmd, const std::string& name, double& value, const std::string& help)
{
    return cmd.add_option(name, value, help)->check(CLI::Range(0.0, 1.0))->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    CLI::App app("Missing-data imputation, scoring and benchmarks", "imputekit");
    app.require_subcommand(1);

    auto* impute = app.add_subcommand("impute", "Impute a CSV file");
    add_common(*impute, cfg);
    add_imputer_options(*impute, cfg);
    impute->add_option("--input", cfg.input, "Input CSV")->required();
    impute->add_option("--method", cfg.method, "Imputation method")->check(method_validator())->capture_default_str();
    impute->add_option("--na-token", cfg.na_token, "Token marking a missing cell")->capture_default_str();
    impute->add_flag("--allow-small-fits", cfg.allow_small_fits,
                     "Impute columns with too few observed rows from predictor-free models instead of failing");

    auto* score = app.add_subcommand("score", "Rank methods by energy-I-Score");
    add_common(*score, cfg);
    add_imputer_options(*score, cfg);
    add_methods(*score, cfg);
    add_data_shape(*score, cfg);
    score->add_option("--input", cfg.input, "Input CSV (default: a simulated uniform example)");
    score->add_option("--na-token", cfg.na_token, "Token marking a missing cell")->capture_default_str();
    score->add_option("--N", cfg.N, "Imputations per method")->check(CLI::PositiveNumber)->capture_default_str();
    add_fraction(*score, "--mask-fraction", cfg.mask_fraction, "Share of observed cells held out");

    auto* bench = app.add_subcommand("bench", "Run a benchmark experiment");
    bench->require_subcommand(1);
    std::vector<CLI::App*> experiments{
        bench->add_subcommand("gaussian", "Slope bias under prediction vs stochastic imputation"),
        bench->add_subcommand("uniform-quantile", "Quantile estimates under MAR missingness"),
        bench->add_subcommand("coverage", "Bootstrap interval coverage"),
    };
    std::vector<CLI::Option*> reps_opts, b_opts, l_opts;
    for (auto* e : experiments) {
        add_common(*e, cfg);
        add_imputer_options(*e, cfg);
        add_methods(*e, cfg);
        add_data_shape(*e, cfg);
        reps_opts.push_back(
            e->add_option("--reps", cfg.reps, "Replications")->check(CLI::PositiveNumber)->capture_default_str());
        b_opts.push_back(
            e->add_option("--B", cfg.B, "Coverage simulations")->check(CLI::PositiveNumber)->capture_default_str());
        l_opts.push_back(
            e->add_option("--L", cfg.L, "Bootstrap replicates")->check(CLI::PositiveNumber)->capture_default_str());
        add_fraction(*e, "--alpha", cfg.alpha, "Quantile level");
        add_fraction(*e, "--ci-alpha", cfg.ci_alpha, "Intervals have level 1 - ci-alpha");
        e->add_flag("--fast", cfg.fast, "Desk-scale presets: reps=10, B=25, L=15");
    }

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        app.parse(std::vector<std::string>(expanded.rbegin(), expanded.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (cfg.fast) {
        auto unset = [](const std::vector<CLI::Option*>& opts) {
            return std::all_of(opts.begin(), opts.end(), [](const CLI::Option* o) { return o->count() == 0; });
        };
        if (unset(reps_opts)) {
            cfg.reps = 10;
        }
        if (unset(b_opts)) {
            cfg.B = 25;
        }
        if (unset(l_opts)) {
            cfg.L = 15;
        }
    }

    Outputs outputs(cfg.output_dir);
    try {
        if (impute->parsed()) {
            cmd_impute(cfg, outputs, out);
        } else if (score->parsed()) {
            cmd_score(cfg, outputs, out);
        } else if (experiments[0]->parsed()) {
            cmd_bench_gaussian(cfg, outputs, out);
        } else if (experiments[1]->parsed()) {
            cmd_bench_quantile(cfg, outputs, out);
        } else {
            cmd_bench_coverage(cfg, outputs, out);
        }
    } catch (const ConfigError& e) {
        outputs.rollback();
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        outputs.rollback();
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace imputekit::cli
