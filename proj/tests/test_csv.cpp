#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "imputekit/csv.hpp"
#include "imputekit/error.hpp"

using namespace imputekit;

namespace {

std::filesystem::path temp_file(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("imputekit_test_" + name);
}

bool same_dataset(const MaskedDataset& a, const MaskedDataset& b)
{
    if (!(a.columns() == b.columns()) || !(a.mask() == b.mask())) {
        return false;
    }
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (!a.is_missing(i, j) && !testing::same_bits(a.values(j)[i], b.values(j)[i])) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

TEST_CASE("walkthrough table parses with the expected mask and kinds")
{
    const auto ds = parse_csv(testing::walkthrough_csv());
    REQUIRE(ds.rows() == 3);
    REQUIRE(ds.cols() == 3);
    CHECK(ds.column(0).kind.is_numeric());
    CHECK(ds.column(1).kind.is_numeric());
    CHECK(ds.column(2).kind.levels() == std::vector<std::string>{"F", "M"});
    const std::vector<std::vector<bool>> expected{{false, true, false}, {false, false, true}, {true, false, false}};
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(ds.is_missing(i, j) == expected[i][j]);
        }
    }
    CHECK(same_dataset(ds, testing::walkthrough_table()));
}

TEST_CASE("no missing tokens means an all-zero mask")
{
    const auto ds = parse_csv("a,b\n1,2\n3,4\n");
    CHECK(ds.complete());
}

TEST_CASE("fully missing column is rejected")
{
    CHECK_THROWS_AS(parse_csv("a,b\n1,NA\n2,NA\n"), IngestionError);
}

TEST_CASE("ragged rows report the row number")
{
    try {
        parse_csv("a,b\n1,2\n3\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
}

TEST_CASE("missing tokens, empty fields and categorical detection")
{
    const auto ds = parse_csv("x,y,z\n1,,b\n?,2e3,a\n3,-4.5,b\n", {.na_token = "?", .schema_hint = {}});
    CHECK(ds.is_missing(1, 0));
    CHECK(ds.is_missing(0, 1));
    CHECK(ds.values(1)[1] == 2000.0);
    CHECK(ds.values(1)[2] == -4.5);
    CHECK(ds.column(2).kind.levels() == std::vector<std::string>{"b", "a"});
    CHECK(ds.values(2)[1] == 1.0);

    // A single non-numeric token makes the column categorical.
    const auto mixed = parse_csv("v\n1\n2\nx\n");
    CHECK(mixed.column(0).kind.levels() == std::vector<std::string>{"1", "2", "x"});
}

TEST_CASE("schema hints override inference")
{
    CsvOptions options;
    options.schema_hint = {ColumnKind::categorical({"0", "1", "2"}), std::nullopt};
    const auto ds = parse_csv("k,v\n2,1.5\n0,NA\n1,3\n", options);
    CHECK(ds.column(0).kind.is_categorical());
    CHECK(ds.values(0)[0] == 2.0);
    CHECK(ds.column(1).kind.is_numeric());

    options.schema_hint = {ColumnKind::categorical({"0", "1"}), std::nullopt};
    CHECK_THROWS_AS(parse_csv("k,v\n2,1.5\n0,NA\n", options), IngestionError);
}

TEST_CASE("quoted fields")
{
    const auto records = parse_csv_records("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\n\"multi\nline\",z\n");
    REQUIRE(records.size() == 3);
    CHECK(records[1][0] == "x, y");
    CHECK(records[1][1] == "say \"hi\"");
    CHECK(records[2][0] == "multi\nline");
    CHECK(escape_field("plain") == "plain");
    CHECK(escape_field("a,b") == "\"a,b\"");
    CHECK(escape_field("q\"") == "\"q\"\"\"");
}

TEST_CASE("number formatting round-trips exactly")
{
    auto rng = seed_tree(5, {0});
    for (int i = 0; i < 2000; ++i) {
        const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.index(30)) - 15.0);
        const auto text = format_number(v);
        CHECK(testing::same_bits(std::stod(text), v));
    }
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(25.5) == "25.5");
    CHECK(format_number(12000) == "12000");
}

TEST_CASE("write then read is the identity on fuzzed datasets")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto ds = testing::fuzz_dataset(seed, {.rows = 25, .numeric = 3, .categorical = 2, .miss_prob = 0.25});
        const auto path = temp_file("roundtrip.csv");
        write_csv(ds, path);
        CsvOptions options;
        for (const auto& c : ds.columns()) {
            // Level labels like "L0" would be inferred anyway; numeric columns
            // need no hint. The hint pins level order for unused levels.
            options.schema_hint.push_back(c.kind.is_categorical() ? std::optional(c.kind) : std::nullopt);
        }
        const auto back = read_csv(path, options);
        CHECK(same_dataset(ds, back));
        // Second trip through text is byte-stable.
        CHECK(to_csv(back) == to_csv(ds));
        std::filesystem::remove(path);
    }
}

TEST_CASE("inferred kinds survive a round trip")
{
    const auto ds = parse_csv(testing::walkthrough_csv());
    const auto back = parse_csv(to_csv(ds));
    CHECK(same_dataset(ds, back));
    const auto none = parse_csv("a,b\n1.25,x\n-3,y\n");
    CHECK(same_dataset(none, parse_csv(to_csv(none))));
}

TEST_CASE("completed datasets write labels and numbers")
{
    const auto walk = testing::walkthrough_table();
    auto values = walk.column_values();
    values[0][2] = 25.5;
    values[1][0] = 12771.0;
    values[2][1] = 0.0;
    const CompletedDataset done(walk, values);
    CHECK(to_csv(done) == "Age,Income,Gender\n33,12771,F\n18,12000,F\n25.5,13542,M\n");
}

TEST_CASE("I/O failures name the path")
{
    try {
        read_csv("/nonexistent/dir/file.csv");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/file.csv") != std::string::npos);
    }
    const auto ds = testing::walkthrough_table();
    CHECK_THROWS_AS(write_csv(ds, "/nonexistent/dir/out.csv"), Error);
}
