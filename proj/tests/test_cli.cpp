#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "commands.hpp"
#include "helpers.hpp"
#include "imputekit/csv.hpp"
#include "imputekit/report.hpp"

using namespace imputekit;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run_cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir
{
  public:
    explicit TempDir(const std::string& tag)
        : path_(fs::temp_directory_path() / ("imputekit_cli_" + tag + "_" + std::to_string(::getpid())))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

std::size_t count_of(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

// Parses with the Python XML parser; true when the document is well formed.
bool well_formed_xml(const fs::path& path)
{
    const std::string cmd = std::string(IMPUTEKIT_PYTHON) + " -c \"import sys, xml.etree.ElementTree as E; E.parse(sys.argv[1])\" '" +
                            path.string() + "'";
    return std::system(cmd.c_str()) == 0;
}

// A 60-row numeric CSV with holes in two columns.
std::string small_csv()
{
    const auto ds = testing::fuzz_dataset(11, {.rows = 60, .numeric = 3, .categorical = 0, .miss_prob = 0.15}, 30);
    return to_csv(ds);
}

}  // namespace

TEST_CASE("usage errors exit with code 2")
{
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
    CHECK(run_cli({"impute"}).code == cli::kExitUsage);
    const auto bad = run_cli({"impute", "--input", "x.csv", "--method", "mice-drf"});
    CHECK(bad.code == cli::kExitUsage);
    CHECK(run_cli({"bench", "gaussian", "--jobs", "0"}).code == cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("runtime failures exit with code 1")
{
    TempDir dir("io");
    const auto r = run_cli({"impute", "--input", dir / "missing.csv", "--output-dir", dir / "out"});
    CHECK(r.code == cli::kExitFailure);
    CHECK(r.err.find("missing.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path() / "out"));
}

TEST_CASE("impute writes completions, mask and chains")
{
    TempDir dir("impute");
    spit(dir.path() / "walk.csv", testing::walkthrough_csv());

    // The walkthrough table is below the fitting-set minimum.
    auto r = run_cli({"impute", "--input", dir / "walk.csv", "--output-dir", dir / "out", "--m", "2"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("Age") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path() / "out"));

    r = run_cli({"impute", "--input", dir / "walk.csv", "--output-dir", dir / "out", "--m", "2", "--method",
                 "mice-norm-nob", "--allow-small-fits", "--max-iter", "1"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("note: column 'Age'") != std::string::npos);
    CHECK(slurp(dir.path() / "out" / "mask.csv") == "Age,Income,Gender\n0,1,0\n0,0,1\n1,0,0\n");
    const auto first = read_csv(dir.path() / "out" / "imp_1.csv");
    CHECK(first.complete());
    CHECK(first.values(0)[0] == 33.0);
    CHECK(first.values(1)[2] == 13542.0);
    CHECK(fs::exists(dir.path() / "out" / "imp_2.csv"));
    const auto chains = slurp(dir.path() / "out" / "chains.csv");
    CHECK(chains.rfind("chain,iteration,column,mean\n", 0) == 0);
    CHECK(chains.find("1,0,Age,25.5\n") != std::string::npos);
    CHECK(chains.find("1,0,Income,12771\n") != std::string::npos);
}

TEST_CASE("a failed write rolls back earlier outputs")
{
    TempDir dir("rollback");
    spit(dir.path() / "in.csv", small_csv());
    fs::create_directories(dir.path() / "out" / "mask.csv");
    const auto r = run_cli({"impute", "--input", dir / "in.csv", "--output-dir", dir / "out", "--method", "knn"});
    CHECK(r.code == cli::kExitFailure);
    CHECK_FALSE(fs::exists(dir.path() / "out" / "imp_1.csv"));
}

TEST_CASE("config file values yield to command-line flags")
{
    TempDir dir("config");
    spit(dir.path() / "in.csv", small_csv());
    spit(dir.path() / "run.cfg", "# defaults\nmethod = mice-cart\nm = 3\nmax-iter = 2\n");
    auto r = run_cli({"impute", "--config", dir / "run.cfg", "--input", dir / "in.csv", "--output-dir", dir / "a"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.rfind("mice-cart: 3 completions", 0) == 0);
    CHECK(fs::exists(dir.path() / "a" / "imp_3.csv"));

    r = run_cli({"impute", "--config", dir / "run.cfg", "--input", dir / "in.csv", "--output-dir", dir / "b", "--m",
                 "2", "--method", "knn"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.rfind("knn: 2 completions", 0) == 0);
    CHECK_FALSE(fs::exists(dir.path() / "b" / "imp_3.csv"));

    spit(dir.path() / "bad.cfg", "no equals sign here\n");
    CHECK(run_cli({"impute", "--config", dir / "bad.cfg", "--input", dir / "in.csv"}).code == cli::kExitUsage);
    CHECK(run_cli({"impute", "--config", dir / "nope.cfg", "--input", dir / "in.csv"}).code == cli::kExitUsage);
}

TEST_CASE("reruns are byte-identical and independent of --jobs")
{
    TempDir dir("repro");
    spit(dir.path() / "in.csv", small_csv());
    const std::vector<std::string> base{"impute", "--input", dir / "in.csv", "--method", "mice-rf", "--m", "3",
                                        "--max-iter", "2", "--seed", "5"};
    auto with = [&](std::string out, std::string jobs) {
        auto args = base;
        args.insert(args.end(), {"--output-dir", dir / out, "--jobs", jobs});
        return run_cli(args).code;
    };
    REQUIRE(with("a", "1") == cli::kExitOk);
    REQUIRE(with("b", "1") == cli::kExitOk);
    REQUIRE(with("c", "3") == cli::kExitOk);
    for (const std::string name : {"imp_1.csv", "imp_2.csv", "imp_3.csv", "chains.csv"}) {
        CHECK(slurp(dir.path() / "a" / name) == slurp(dir.path() / "b" / name));
        CHECK(slurp(dir.path() / "a" / name) == slurp(dir.path() / "c" / name));
    }

    const std::vector<std::string> score{"score", "--input", dir / "in.csv", "--methods", "knn,mice-norm",
                                         "--N", "5", "--max-iter", "2"};
    auto score_with = [&](std::string out, std::string jobs) {
        auto args = score;
        args.insert(args.end(), {"--output-dir", dir / out, "--jobs", jobs});
        return run_cli(args);
    };
    const auto s1 = score_with("s1", "1");
    REQUIRE(s1.code == cli::kExitOk);
    CHECK(s1.out.find("knn") != std::string::npos);
    REQUIRE(score_with("s2", "2").code == cli::kExitOk);
    CHECK(slurp(dir.path() / "s1" / "scores.csv") == slurp(dir.path() / "s2" / "scores.csv"));
}

TEST_CASE("bench commands write tables and well-formed figures")
{
    TempDir dir("bench");
    auto r = run_cli({"bench", "gaussian", "--n", "150", "--reps", "2", "--m", "2", "--max-iter", "2",
                      "--output-dir", dir / "g"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(slurp(dir.path() / "g" / "gaussian_summary.csv").rfind("method,mean,sd,reps\nfull-data,", 0) == 0);
    const auto svg = slurp(dir.path() / "g" / "gaussian.svg");
    CHECK(well_formed_xml(dir.path() / "g" / "gaussian.svg"));
    // Full data plus two methods, 150 circles each.
    CHECK(count_of(svg, "<circle") == 3 * 150);

    r = run_cli({"bench", "uniform-quantile", "--n", "200", "--reps", "5", "--m", "2", "--max-iter", "2",
                 "--methods", "knn,mice-cart", "--output-dir", dir / "q"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(well_formed_xml(dir.path() / "q" / "quantile.svg"));
    const auto rows = slurp(dir.path() / "q" / "quantile_rows.csv");
    CHECK(count_of(rows, ",knn,") == 5);
    CHECK(count_of(rows, ",complete-case,") == 5);
    CHECK(slurp(dir.path() / "q" / "quantile_oracle.csv").rfind("alpha,complete_case_oracle,draws\n0.1,0.10", 0) ==
          0);

    r = run_cli({"bench", "coverage", "--n", "120", "--B", "10", "--L", "3", "--m", "2", "--max-iter", "2",
                 "--methods", "knn", "--output-dir", dir / "c"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(well_formed_xml(dir.path() / "c" / "coverage.svg"));
    CHECK(count_of(slurp(dir.path() / "c" / "coverage_rows.csv"), "\nknn,") == 10);
}

TEST_CASE("figures escape text and draw one circle per row in every panel")
{
    std::vector<Column> columns{{"a<b", ColumnKind::numeric()}, {"c&d", ColumnKind::numeric()}};
    std::vector<std::vector<std::optional<double>>> cells{{1.0, 2.0, 3.0, std::nullopt}, {4.0, 5.0, 6.0, 7.0}};
    const MaskedDataset masked(columns, cells);
    const MaskedDataset full(columns, std::vector<std::vector<double>>{{1, 2, 3, 4}, {4, 5, 6, 7}});
    auto values = masked.column_values();
    values[0][3] = 2.5;
    const std::vector<std::pair<std::string, CompletedDataset>> panels{{"x\"y", CompletedDataset(masked, values)}};
    const auto svg = scatter_panels_svg(full, panels);
    CHECK(svg.find("a<b") == std::string::npos);
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(count_of(svg, "<circle") == 8);
    const std::regex group("<g id=\"points-[0-9]+\"");
    CHECK(std::distance(std::sregex_iterator(svg.begin(), svg.end(), group), std::sregex_iterator()) == 2);
}
