#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "imputekit/benchmarks.hpp"
#include "imputekit/bootstrap.hpp"
#include "imputekit/dataset.hpp"

namespace imputekit {

// Standalone SVG documents; no scripts, fonts or external references.

/*!
 * Side-by-side scatter plots of column 1 (vertical) against column 0: the
 * full data, then one panel per completion. Imputed points are highlighted.
 * Every panel draws exactly one circle per row.
 */
std::string scatter_panels_svg(const MaskedDataset& full,
                               std::span<const std::pair<std::string, CompletedDataset>> completions);

/*!
 * One strip of per-replication estimates per method, in summary order, with
 * a blue line at `alpha` and a red line at the complete-case `oracle`.
 */
std::string quantile_strip_svg(std::span<const EstimateRow> rows, std::span<const MethodSummary> summary,
                               double alpha, double oracle);

/// One panel per method of interval segments by replication; dashed truth.
std::string coverage_svg(const CoverageResult& result, double true_value);

}  // namespace imputekit
