#pragma once

#include "demandsplit/histogram.hpp"
#include "demandsplit/series.hpp"

namespace demandsplit {

/// Scaled city-block distance between two histogram classes:
/// |f_s - f_t| + alpha * |c_s - c_t|.
double scaled_cityblock(double f_s, double f_t, double c_s, double c_t, double alpha);
double scaled_cityblock(const Histogram& h, int s, int t);

/// Symmetric matrix whose (s,t) entry is the sum of the adjacent-class
/// distances between s and t. Adjacent classes are one width apart, so
/// d(k, k+1) = |f_k - f_{k+1}| + alpha * width. The cumulative definition
/// makes the matrix chain-additive: d(s,t) = d(s,u) + d(u,t) for s < u < t,
/// which is what forces clusters to be contiguous ranges of classes.
Matrix chain_distance_matrix(const Vector& adjacent);

/// Per-class weights scale each adjacent step by the mean of its endpoint
/// weights; an empty vector means all ones.
Matrix series_distance_matrix(const Histogram& h, const Vector& class_weights = Vector());

/// Same construction applied to a time series: observation order plays the
/// class axis (unit spacing), demand plays the frequency, and
/// alpha = sum(y) / (n - 1). Demand must be non-negative, so run the
/// back-order filter first.
Matrix timeseries_distance_matrix(const TimeSeries& y);

} // namespace demandsplit
