#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace imputekit::cli {

/// Everything a subcommand can be configured with. Defaults match `--help`.
struct RunConfig
{
    std::string input;
    std::filesystem::path output_dir = ".";
    std::string method = "mice-cart";
    std::vector<std::string> methods;  // empty: per-command default
    std::uint64_t seed = 1;
    std::size_t m = 5;
    std::size_t max_iter = 10;
    std::size_t k = 5;
    std::size_t n_trees = 10;
    std::size_t missforest_trees = 100;
    std::size_t L = 30;
    std::size_t B = 200;
    std::size_t reps = 50;
    std::size_t n = 5000;
    std::size_t d = 5;
    double alpha = 0.1;     // quantile level
    double ci_alpha = 0.05; // confidence intervals have level 1 - ci_alpha
    double mask_fraction = 0.2;
    std::size_t N = 20;
    std::size_t jobs = 1;
    bool fast = false;
    bool allow_small_fits = false;
    std::string na_token = "NA";
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Parse `args` (without the program name) and run the chosen subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace imputekit::cli
