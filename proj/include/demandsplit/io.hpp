#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "demandsplit/splitter.hpp"
#include "demandsplit/synth.hpp"

namespace demandsplit {

/// Reads the product_id,week,demand table. Demand must be a signed integer,
/// weeks per product a consecutive 1-based range (rows may arrive in any
/// order). Products come back in first-appearance order.
std::vector<TimeSeries> load_series(std::istream& in);
std::vector<TimeSeries> load_series_file(const std::filesystem::path& path);

void write_series_csv(std::ostream& out, const std::vector<TimeSeries>& products);

/// Per-product artifacts.
void write_split_csv(std::ostream& out, const ProductAnalysis& a);
void write_hist_csv(std::ostream& out, const ProductAnalysis& a);
void write_plotdata_csv(std::ostream& out, const ProductAnalysis& a);
std::string report_json(const ProductAnalysis& a);

/// Portfolio tables. Every column's average row is taken over its populated
/// cells only.
void write_summary_csv(std::ostream& out, const std::vector<ProductAnalysis>& all);
void write_volumes_csv(std::ostream& out, const std::vector<ProductAnalysis>& all);
void write_innovation_csv(std::ostream& out,
                          const std::vector<std::pair<std::string, Breakpoint>>& candidates,
                          double shift_tolerance);

void write_ground_truth_csv(std::ostream& out, const SynthResult& r);

/// The analyze collector: summary.csv, volumes.csv and the per-product
/// report/split/histogram/dendrogram/plot files for every product that has
/// them. Creates the directory if needed.
void write_portfolio_outputs(const std::filesystem::path& dir,
                             const std::vector<ProductAnalysis>& all);

} // namespace demandsplit
